//! Barrier-certificate synthesis: instantiate the HSOS condition system over
//! the schedule phases, assemble the conic problem, solve, and extract a
//! cleaned certificate.

pub mod build;
pub mod certificate;
pub mod hyper;
pub mod plan;
pub mod synthesize;

pub use build::{build_constraints, BuildArtifacts, MatchedExpression};
pub use certificate::{BarrierCertificate, CertificateError, CertificateFile, Constants, Provenance};
pub use hyper::{DChoice, HyperError, Hyperparams, MultiplierDegrees, ObjectiveMode};
pub use plan::{phase_plan, PhasePlan, PlanInstance};
pub use synthesize::{
    synthesize, NoCertReason, SynthError, SynthOutcome, SynthResult, SynthStats, RESIDUAL_TOL,
};
