//! Library side of the command-line front end: configuration parsing,
//! pipeline orchestration, case-study suites and report generation.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod suites;

pub use config::{BudgetConfig, ConfigError, JobConfig, SystemConfig};
pub use pipeline::{default_backend, run_suite, run_synth, verify_certificate, ObligationReport};
pub use report::{JobStatus, ReportRow, RunReport};
pub use suites::{suite_jobs, Suite, SuiteJob};
