//! Synthesis and independent verification of k-inductive barrier certificates
//! for quantum circuits modeled as discrete-time complex-space dynamical
//! systems.
//!
//! The pipeline has three stages:
//!
//! 1. [`qsystem`] describes a circuit as a finite set of unitary modes driven
//!    by an eventually-periodic schedule, together with complex semi-algebraic
//!    initial and unsafe regions.
//! 2. [`synth`] compiles the barrier-certificate conditions into Hermitian
//!    sum-of-squares constraints ([`hsos`]), realifies them into a semidefinite
//!    program and hands that to a pluggable conic backend.
//! 3. [`certify`] re-checks a candidate certificate from scratch: sampling
//!    falsification, interval branch-and-bound, SMT-LIB export for external
//!    solvers, and trajectory-level simulation.
//!
//! All polynomial data lives in [`cpoly`]: sparse polynomials over the complex
//! variables `z_0..z_{n-1}` and their conjugates.

pub mod certify;
pub mod cpoly;
pub mod hsos;
pub mod qsystem;
pub mod synth;

pub use cpoly::{CPolynomial, MonomialKey, TermRecord};
pub use qsystem::{QSystem, Region, Schedule, UnitaryMode};
pub use synth::{BarrierCertificate, Hyperparams, SynthOutcome};
pub use hsos::{ConicProblem, MonomialBasis, SolveOutcome, SolverBackend};

/// Coefficients with magnitude below this are dropped from sparse polynomials.
pub const COEFF_DROP_TOL: f64 = 1e-12;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
