//! Independent certificate verification: proof-obligation generation,
//! sampling falsification, interval branch-and-bound, SMT-LIB export, and
//! trajectory-level safety simulation.

pub mod interval;
pub mod obligation;
pub mod real;
pub mod sample;
pub mod simulate;
pub mod smtlib;

pub use interval::{interval_verify, IntervalOptions};
pub use obligation::{obligations, ObligationError, ProofObligation, Verdict};
pub use real::{Interval, RealPoly};
pub use sample::{sample_falsify, sample_region, SampleError};
pub use simulate::{simulate_safety, SafetyReport};
pub use smtlib::{emit_smtlib, file_stem, obligation_to_smtlib, validate_smtlib, SmtError};
