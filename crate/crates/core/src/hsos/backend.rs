//! Pluggable conic solver backends.

use super::conic::ConicProblem;

/// Result of handing a [`ConicProblem`] to a backend. Infeasibility is a
/// certified outcome, distinct from numerical breakdown; callers rely on the
/// distinction.
#[derive(Debug, Clone)]
pub enum SolveOutcome {
    /// Assignment of all real decision variables.
    Feasible(Vec<f64>),
    /// The backend certified that no feasible point exists.
    Infeasible,
    /// Iteration limit, numerical trouble, or any other failure to decide.
    SolverError(String),
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible(_))
    }
}

/// A conic solver. Implementations must be reentrant: independent solve
/// calls may run concurrently.
pub trait SolverBackend: Send + Sync {
    fn solve_raw(&self, problem: &ConicProblem) -> SolveOutcome;

    fn name(&self) -> &str;
}

/// Solves and then validates the assignment against the problem's own
/// tolerances (PSD blocks ≥ −1e−7, equality residuals ≤ 1e−6). A solution
/// failing validation is downgraded to a solver error rather than reported
/// as feasible.
pub fn solve(problem: &ConicProblem, backend: &dyn SolverBackend) -> SolveOutcome {
    if let Some(reason) = &problem.structurally_infeasible {
        let _ = reason;
        return SolveOutcome::Infeasible;
    }
    match backend.solve_raw(problem) {
        SolveOutcome::Feasible(x) => match problem.validate_assignment(&x) {
            Ok(()) => SolveOutcome::Feasible(x),
            Err(msg) => SolveOutcome::SolverError(format!(
                "{} returned an assignment that fails validation: {msg}",
                backend.name()
            )),
        },
        other => other,
    }
}

/// Test backend returning a canned outcome.
pub struct MockBackend {
    pub outcome: SolveOutcome,
}

impl SolverBackend for MockBackend {
    fn solve_raw(&self, _problem: &ConicProblem) -> SolveOutcome {
        self.outcome.clone()
    }

    fn name(&self) -> &str {
        "mock"
    }
}
