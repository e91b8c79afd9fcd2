//! `qbarrier`: synthesize and independently verify k-inductive barrier
//! certificates for quantum circuits.
//!
//! Exit codes: 0 on success (certificate found / all obligations verified),
//! 1 on domain failure (unsolved, falsified, unsafe trajectory), 2 on usage
//! or configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qbarrier_cli::config::{BudgetConfig, JobConfig};
use qbarrier_cli::pipeline::{default_backend, run_suite, run_synth, verify_certificate};
use qbarrier_cli::report::{JobStatus, ReportRow, RunReport};
use qbarrier_cli::suites::{suite_jobs, Suite};
use qbarrier_core::certify::{emit_smtlib, obligations, simulate_safety};
use qbarrier_core::synth::CertificateFile;

#[derive(Parser)]
#[command(name = "qbarrier", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CheckerFlags {
    /// Sampling budget per obligation.
    #[arg(long)]
    samples: Option<u64>,
    /// Branch-and-bound depth limit.
    #[arg(long)]
    depth: Option<u32>,
    /// Falsification tolerance for the interval checker.
    #[arg(long)]
    delta: Option<f64>,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CheckerFlags {
    fn budgets(&self, base: BudgetConfig) -> BudgetConfig {
        BudgetConfig {
            samples: self.samples.unwrap_or(base.samples),
            depth: self.depth.unwrap_or(base.depth),
            delta: self.delta.unwrap_or(base.delta),
            ..base
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a barrier certificate for a job configuration.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for the certificate and report.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a certificate against its system with both in-process checkers.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Certificate file produced by `synth`.
        #[arg(long)]
        cert: PathBuf,
        #[command(flatten)]
        checker: CheckerFlags,
    },
    /// Export proof obligations as SMT-LIB 2 files for external solvers.
    SmtExport {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample initial states and simulate trajectories, counting unsafe
    /// visits.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trajectories: Option<u64>,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-run the case studies and emit a status table.
    Reproduce {
        /// One of z-gate | x-gate | xz-gates | grover | all.
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        out: PathBuf,
        /// Concurrent jobs.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Include jobs that need substantially more memory and time.
        #[arg(long, default_value_t = false)]
        allow_large: bool,
        #[command(flatten)]
        checker: CheckerFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Synth { config, out, seed } => cmd_synth(&config, &out, seed),
        Command::Check {
            config,
            cert,
            checker,
        } => cmd_check(&config, &cert, &checker),
        Command::SmtExport { config, cert, out } => cmd_smt_export(&config, &cert, &out),
        Command::Simulate {
            config,
            trajectories,
            horizon,
            seed,
        } => cmd_simulate(&config, trajectories, horizon, seed),
        Command::Reproduce {
            suite,
            out,
            workers,
            allow_large,
            checker,
        } => cmd_reproduce(suite, &out, workers, allow_large, &checker),
    }
}

fn base_dir(config: &Path) -> PathBuf {
    config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_system(
    config: &Path,
) -> anyhow::Result<(qbarrier_core::QSystem, qbarrier_core::Hyperparams, JobConfig)> {
    let job = JobConfig::from_file(config)?;
    let (system, hyper) = job.resolve(&base_dir(config))?;
    Ok((system, hyper, job))
}

fn cmd_synth(config: &Path, out: &Path, seed: Option<u64>) -> anyhow::Result<ExitCode> {
    let (system, hyper, job) = load_system(config)?;
    let _ = seed.unwrap_or(job.seed); // synthesis itself is deterministic
    let backend = default_backend();
    let outcome = run_synth(&system, &hyper, &backend)?;
    std::fs::create_dir_all(out)?;

    let mut report = RunReport::default();
    let mut row = ReportRow {
        experiment: config.display().to_string(),
        qubits: system.n_qubits(),
        target: 0,
        status: outcome.status.clone(),
        detail: outcome.detail.clone(),
        setup_seconds: outcome.setup_seconds,
        solve_seconds: outcome.solve_seconds,
        verification: Vec::new(),
        verification_seconds: 0.0,
    };

    let code = match &outcome.certificate {
        Some(cert) => {
            let mut cert = cert.cleanup(1e-12, 12);
            cert.provenance.timestamp = Some(now_rfc3339());
            let file = CertificateFile::from_certificate(&cert);
            let path = out.join("certificate.json");
            std::fs::write(&path, file.to_json()?)?;
            println!("certificate written to {}", path.display());
            ExitCode::SUCCESS
        }
        None => {
            println!("unsolved: {}", outcome.detail);
            row.verification = vec![outcome.detail.clone()];
            ExitCode::from(1)
        }
    };
    report.rows.push(row);
    std::fs::write(out.join("report.csv"), report.csv())?;
    print!("{}", report.text_table());
    Ok(code)
}

fn load_certificate(path: &Path) -> anyhow::Result<qbarrier_core::BarrierCertificate> {
    let text = std::fs::read_to_string(path)?;
    Ok(CertificateFile::from_json(&text)?.into_certificate()?)
}

fn cmd_check(config: &Path, cert: &Path, checker: &CheckerFlags) -> anyhow::Result<ExitCode> {
    let (system, _, job) = load_system(config)?;
    let cert = load_certificate(cert)?;
    let budgets = checker.budgets(job.budgets);
    let reports = verify_certificate(&system, &cert, &budgets, checker.seed, 2_000_000)?;
    let mut all_verified = true;
    for r in &reports {
        println!("{}", r.summary());
        if let qbarrier_core::certify::Verdict::Falsified { witness, violation } =
            &r.sample_verdict
        {
            println!("  witness: {witness:?} violation {violation:.6e}");
        }
        if let qbarrier_core::certify::Verdict::Falsified { witness, violation } =
            &r.interval_verdict
        {
            println!("  witness: {witness:?} violation {violation:.6e}");
        }
        all_verified &= r.is_verified();
    }
    Ok(if all_verified {
        println!("all {} obligations verified", reports.len());
        ExitCode::SUCCESS
    } else {
        println!("verification failed");
        ExitCode::from(1)
    })
}

fn cmd_smt_export(config: &Path, cert: &Path, out: &Path) -> anyhow::Result<ExitCode> {
    let (system, _, _) = load_system(config)?;
    let cert = load_certificate(cert)?;
    let obs = obligations(&system, &cert)?;
    let paths = emit_smtlib(&obs, out)?;
    for p in &paths {
        println!("{}", p.display());
    }
    println!("{} obligation files written", paths.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(
    config: &Path,
    trajectories: Option<u64>,
    horizon: Option<u64>,
    seed: u64,
) -> anyhow::Result<ExitCode> {
    let (system, _, job) = load_system(config)?;
    let trajectories = trajectories.unwrap_or(job.budgets.trajectories);
    let horizon = horizon.unwrap_or(job.budgets.horizon);
    let report = simulate_safety(&system, trajectories, horizon, seed)?;
    println!(
        "trajectories: {} horizon: {} unsafe entries: {} min unsafe margin: {:.6e}",
        report.trajectories, report.horizon, report.unsafe_entries, report.min_unsafe_margin
    );
    Ok(if report.unsafe_entries == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_reproduce(
    suite: Suite,
    out: &Path,
    workers: usize,
    allow_large: bool,
    checker: &CheckerFlags,
) -> anyhow::Result<ExitCode> {
    let jobs = suite_jobs(suite, allow_large);
    let budgets = checker.budgets(BudgetConfig::default());
    let backend = default_backend();
    let report = run_suite(&jobs, &budgets, checker.seed, workers, &backend);
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("report.csv"), report.csv())?;
    print!("{}", report.text_table());
    let failed = report.rows.iter().any(|r| r.status == JobStatus::Error);
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
