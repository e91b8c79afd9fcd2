//! The synthesis driver: compile, solve, validate, extract.

use std::time::Instant;

use thiserror::Error;

use super::build::{build_constraints, expression_residual};
use super::certificate::{BarrierCertificate, Constants, Provenance};
use super::hyper::{HyperError, Hyperparams};
use crate::hsos::backend::{solve, SolveOutcome, SolverBackend};
use crate::hsos::ops::HsosError;
use crate::qsystem::QSystem;

/// Residual bound every shipped certificate must satisfy when its HSOS
/// identities are re-expanded against the slack Grams.
pub const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Build(#[from] HsosError),
}

/// Why no certificate came back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoCertReason {
    /// The backend certified the constraint system infeasible: no
    /// conjugate-flattening HSOS polynomial barrier exists for this system
    /// at these hyperparameters.
    Infeasible,
    /// The backend failed to decide (iteration limit, numerical breakdown),
    /// or its solution failed validation.
    SolverError(String),
}

#[derive(Debug)]
pub enum SynthOutcome {
    Certificate(Box<BarrierCertificate>),
    NoCertificate { reason: NoCertReason },
}

impl SynthOutcome {
    pub fn is_certificate(&self) -> bool {
        matches!(self, SynthOutcome::Certificate(_))
    }

    pub fn certificate(&self) -> Option<&BarrierCertificate> {
        match self {
            SynthOutcome::Certificate(c) => Some(c),
            SynthOutcome::NoCertificate { .. } => None,
        }
    }
}

/// Problem-size and timing report for one synthesis run.
#[derive(Debug, Clone, Default)]
pub struct SynthStats {
    pub num_vars: usize,
    pub num_equalities: usize,
    pub num_psd_blocks: usize,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    pub max_residual: Option<f64>,
}

#[derive(Debug)]
pub struct SynthResult {
    pub outcome: SynthOutcome,
    pub warnings: Vec<String>,
    pub stats: SynthStats,
}

/// Runs the full pipeline: instantiate the condition system over the
/// schedule phases, assemble the conic problem, solve through the backend,
/// check residuals and extract the barrier collection.
pub fn synthesize(
    system: &QSystem,
    hyper: &Hyperparams,
    backend: &dyn SolverBackend,
) -> Result<SynthResult, SynthError> {
    hyper.validate()?;
    let setup_start = Instant::now();
    let artifacts = build_constraints(system, hyper)?;
    let setup_seconds = setup_start.elapsed().as_secs_f64();

    let mut stats = SynthStats {
        num_vars: artifacts.problem.num_vars(),
        num_equalities: artifacts.problem.equalities.len(),
        num_psd_blocks: artifacts.problem.psd_blocks.len(),
        setup_seconds,
        ..Default::default()
    };

    let solve_start = Instant::now();
    let outcome = solve(&artifacts.problem, backend);
    stats.solve_seconds = solve_start.elapsed().as_secs_f64();

    let result = match outcome {
        SolveOutcome::Feasible(x) => {
            let max_residual = artifacts
                .matched
                .iter()
                .map(|m| expression_residual(m, &x))
                .fold(0.0f64, f64::max);
            stats.max_residual = Some(max_residual);
            if max_residual > RESIDUAL_TOL {
                SynthOutcome::NoCertificate {
                    reason: NoCertReason::SolverError(format!(
                        "assignment violates an HSOS identity: residual {max_residual:.3e}"
                    )),
                }
            } else {
                let phase_barriers = artifacts
                    .barriers
                    .iter()
                    .map(|(phase, sym)| (*phase, sym.evaluate_assignment(&x)))
                    .collect();
                let constants = Constants {
                    k: hyper.k,
                    epsilon: artifacts
                        .epsilon_var
                        .map(|v| x[v.0])
                        .unwrap_or(hyper.epsilon),
                    gamma: artifacts.gamma_var.map(|v| x[v.0]).unwrap_or(hyper.gamma),
                    d: artifacts
                        .d_var
                        .map(|v| x[v.0])
                        .or(hyper.fixed_d())
                        .expect("d is fixed or a variable"),
                };
                let provenance = Provenance {
                    barrier_degree: hyper.barrier_degree,
                    backend: backend.name().to_string(),
                    solver_status: "solved".into(),
                    constraint_inventory: artifacts.inventory.clone(),
                    warnings: artifacts.warnings.clone(),
                    max_residual: Some(max_residual),
                    timestamp: None,
                };
                SynthOutcome::Certificate(Box::new(BarrierCertificate {
                    phase_barriers,
                    constants,
                    provenance,
                }))
            }
        }
        SolveOutcome::Infeasible => SynthOutcome::NoCertificate {
            reason: NoCertReason::Infeasible,
        },
        SolveOutcome::SolverError(msg) => SynthOutcome::NoCertificate {
            reason: NoCertReason::SolverError(msg),
        },
    };

    Ok(SynthResult {
        outcome: result,
        warnings: artifacts.warnings,
        stats,
    })
}
