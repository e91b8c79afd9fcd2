//! Pipeline orchestration shared by the CLI commands: synthesize → cleanup →
//! certify, plus the suite runner with its worker pool.

use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Instant;

use qbarrier_core::certify::{
    interval_verify, obligations, sample_falsify, IntervalOptions, ObligationError,
    ProofObligation, SampleError, Verdict,
};
use qbarrier_core::hsos::{ClarabelBackend, SolverBackend};
use qbarrier_core::qsystem::QSystem;
use qbarrier_core::synth::{
    synthesize, BarrierCertificate, Hyperparams, NoCertReason, SynthError, SynthOutcome,
};
use thiserror::Error;

use crate::config::BudgetConfig;
use crate::report::{JobStatus, ReportRow, RunReport};
use crate::suites::SuiteJob;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Obligation(#[from] ObligationError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Default production backend.
pub fn default_backend() -> ClarabelBackend {
    ClarabelBackend::default()
}

/// Outcome of checking one obligation with both checkers.
#[derive(Debug, Clone)]
pub struct ObligationReport {
    pub id: String,
    pub sample_verdict: Verdict,
    pub interval_verdict: Verdict,
}

impl ObligationReport {
    /// The condition counts as verified only when the interval checker
    /// proves it; sampling alone can merely fail to falsify.
    pub fn is_verified(&self) -> bool {
        self.interval_verdict.is_verified() && !self.sample_verdict.is_falsified()
    }

    pub fn is_falsified(&self) -> bool {
        self.sample_verdict.is_falsified() || self.interval_verdict.is_falsified()
    }

    pub fn summary(&self) -> String {
        let name = |v: &Verdict| match v {
            Verdict::Verified { .. } => "verified".to_string(),
            Verdict::Falsified { violation, .. } => format!("falsified({violation:.3e})"),
            Verdict::Unknown { .. } => "unknown".to_string(),
        };
        format!(
            "{}=[sample:{},interval:{}]",
            self.id,
            name(&self.sample_verdict),
            name(&self.interval_verdict)
        )
    }
}

/// Runs both checkers over every obligation of the certificate.
pub fn verify_certificate(
    system: &QSystem,
    cert: &BarrierCertificate,
    budgets: &BudgetConfig,
    seed: u64,
    max_boxes: u64,
) -> Result<Vec<ObligationReport>, PipelineError> {
    let obs = obligations(system, cert)?;
    let mut out = Vec::with_capacity(obs.len());
    for (i, ob) in obs.iter().enumerate() {
        out.push(check_obligation(ob, budgets, seed.wrapping_add(i as u64), max_boxes)?);
    }
    Ok(out)
}

fn check_obligation(
    ob: &ProofObligation,
    budgets: &BudgetConfig,
    seed: u64,
    max_boxes: u64,
) -> Result<ObligationReport, PipelineError> {
    let sample_verdict = sample_falsify(ob, budgets.samples, 1e-6, seed)?;
    let interval_verdict = interval_verify(
        ob,
        IntervalOptions {
            delta: budgets.delta,
            max_depth: budgets.depth,
            max_boxes,
            ..Default::default()
        },
    );
    Ok(ObligationReport {
        id: ob.id(),
        sample_verdict,
        interval_verdict,
    })
}

/// Synthesis outcome folded into report vocabulary.
pub struct SynthRowOutcome {
    pub status: JobStatus,
    pub detail: String,
    pub certificate: Option<BarrierCertificate>,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
}

/// Runs one synthesis job and classifies the outcome.
pub fn run_synth(
    system: &QSystem,
    hyper: &Hyperparams,
    backend: &dyn SolverBackend,
) -> Result<SynthRowOutcome, PipelineError> {
    let result = synthesize(system, hyper, backend)?;
    let mut detail = result.warnings.join("; ");
    let (status, certificate) = match result.outcome {
        SynthOutcome::Certificate(cert) => (JobStatus::Solved, Some(*cert)),
        SynthOutcome::NoCertificate { reason } => {
            let reason_text = match reason {
                NoCertReason::Infeasible => {
                    "no conjugate-flattening HSOS polynomial barrier exists for this system \
                     with the inputs given (backend-certified infeasible)"
                        .to_string()
                }
                NoCertReason::SolverError(msg) => format!("solver failure: {msg}"),
            };
            if detail.is_empty() {
                detail = reason_text;
            } else {
                detail = format!("{detail}; {reason_text}");
            }
            (JobStatus::Unsolved, None)
        }
    };
    Ok(SynthRowOutcome {
        status,
        detail,
        certificate,
        setup_seconds: result.stats.setup_seconds,
        solve_seconds: result.stats.solve_seconds,
    })
}

/// Runs an entire suite with up to `workers` jobs in flight; report row
/// order matches the job order regardless of scheduling.
pub fn run_suite(
    jobs: &[SuiteJob],
    budgets: &BudgetConfig,
    seed: u64,
    workers: usize,
    backend: &ClarabelBackend,
) -> RunReport {
    let workers = workers.max(1).min(jobs.len().max(1));
    let queue: Mutex<VecDeque<usize>> = Mutex::new((0..jobs.len()).collect());
    let rows: Mutex<Vec<Option<ReportRow>>> = Mutex::new(vec![None; jobs.len()]);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let next = queue.lock().expect("queue lock").pop_front();
                let Some(index) = next else { break };
                let row = run_suite_job(&jobs[index], budgets, seed, backend);
                rows.lock().expect("rows lock")[index] = Some(row);
            });
        }
    });

    RunReport {
        rows: rows
            .into_inner()
            .expect("rows lock")
            .into_iter()
            .map(|r| r.expect("every job produces a row"))
            .collect(),
    }
}

fn run_suite_job(
    job: &SuiteJob,
    budgets: &BudgetConfig,
    seed: u64,
    backend: &ClarabelBackend,
) -> ReportRow {
    let base = ReportRow {
        experiment: job.experiment.clone(),
        qubits: job.n_qubits,
        target: job.target,
        status: JobStatus::Error,
        detail: String::new(),
        setup_seconds: 0.0,
        solve_seconds: 0.0,
        verification: Vec::new(),
        verification_seconds: 0.0,
    };
    let outcome = match run_synth(&job.system, &job.hyper, backend) {
        Ok(o) => o,
        Err(e) => {
            return ReportRow {
                detail: e.to_string(),
                ..base
            };
        }
    };
    let mut row = ReportRow {
        status: outcome.status,
        detail: outcome.detail,
        setup_seconds: outcome.setup_seconds,
        solve_seconds: outcome.solve_seconds,
        ..base
    };
    if let Some(cert) = &outcome.certificate {
        let cert = cert.cleanup(1e-9, 9);
        let cert = &cert;
        let t = Instant::now();
        // Interval search cost grows steeply with dimension; the suite caps
        // the box budget so a row can report `unknown` instead of stalling.
        let max_boxes = if job.system.dim() <= 2 { 2_000_000 } else { 300_000 };
        match verify_certificate(&job.system, cert, budgets, seed, max_boxes) {
            Ok(reports) => {
                row.verification = reports.iter().map(ObligationReport::summary).collect();
                if reports.iter().any(ObligationReport::is_falsified) {
                    row.status = JobStatus::Error;
                    row.detail = "a checker falsified an obligation".into();
                }
            }
            Err(e) => {
                row.verification = vec![format!("verification failed: {e}")];
            }
        }
        row.verification_seconds = t.elapsed().as_secs_f64();
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suites::z_gate_system;

    #[test]
    fn z_gate_job_solves_and_verifies() {
        let system = z_gate_system(1, 0);
        let hyper = Hyperparams::new(1, 0.01, 0.01, 2).with_separation_margin(0.01);
        let backend = default_backend();
        let outcome = run_synth(&system, &hyper, &backend).unwrap();
        assert_eq!(outcome.status, JobStatus::Solved);
        let cert = outcome.certificate.unwrap();
        let budgets = BudgetConfig {
            samples: 5_000,
            depth: 40,
            delta: 1e-4,
            ..Default::default()
        };
        let reports = verify_certificate(&system, &cert, &budgets, 3, 2_000_000).unwrap();
        assert_eq!(reports.len(), 5);
        for r in &reports {
            assert!(r.is_verified(), "{} not verified: {:?}", r.id, r.interval_verdict);
        }
    }

    #[test]
    fn suite_runner_is_order_stable_across_worker_counts() {
        let jobs = vec![
            SuiteJob {
                experiment: "Z gate".into(),
                n_qubits: 1,
                target: 0,
                system: z_gate_system(1, 0),
                hyper: Hyperparams::new(1, 0.01, 0.01, 2),
                large: false,
            },
            SuiteJob {
                experiment: "Z gate".into(),
                n_qubits: 1,
                target: 1,
                system: z_gate_system(1, 1),
                hyper: Hyperparams::new(1, 0.01, 0.01, 2),
                large: false,
            },
        ];
        let budgets = BudgetConfig {
            samples: 1_000,
            depth: 20,
            delta: 1e-4,
            ..Default::default()
        };
        let backend = default_backend();
        let one = run_suite(&jobs, &budgets, 9, 1, &backend);
        let two = run_suite(&jobs, &budgets, 9, 2, &backend);
        let statuses = |r: &RunReport| {
            r.rows
                .iter()
                .map(|row| (row.target, row.status.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(statuses(&one), statuses(&two));
        assert!(one.rows.iter().all(|r| r.status == JobStatus::Solved));
    }
}
