//! Job configuration: structured JSON describing a system, hyperparameters
//! and checker budgets.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use qbarrier_core::cpoly::{CPolynomial, TermRecord};
use qbarrier_core::qsystem::{
    gate, grover_diffusion, grover_oracle, QSystem, Region, Schedule, SphereEncoding, UnitaryMode,
};
use qbarrier_core::hsos::GramForm;
use qbarrier_core::synth::{DChoice, Hyperparams, MultiplierDegrees, ObjectiveMode};
use qbarrier_core::C64;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {msg}")]
    Invalid { field: String, msg: String },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse `{path}`: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl ConfigError {
    pub fn invalid(field: &str, msg: impl Into<String>) -> Self {
        Self::Invalid {
            field: field.to_string(),
            msg: msg.into(),
        }
    }
}

/// Versioned top-level job description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobConfig {
    pub version: u32,
    pub system: SystemRef,
    pub hyper: HyperConfig,
    #[serde(default)]
    pub budgets: BudgetConfig,
    #[serde(default)]
    pub seed: u64,
}

/// Inline system or a reference to a separate file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemRef {
    File { file: PathBuf },
    Inline(SystemConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n_qubits: u32,
    pub modes: Vec<ModeExpr>,
    pub schedule: ScheduleConfig,
    pub regions: RegionsConfig,
    #[serde(default)]
    pub sphere_encoding: SphereEncoding,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleConfig {
    #[serde(default)]
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionsConfig {
    pub initial: Vec<BuilderExpr>,
    #[serde(rename = "unsafe")]
    pub unsafe_region: Vec<BuilderExpr>,
    /// Extra state-space constraints beyond the sphere (rarely needed).
    #[serde(default)]
    pub state_space: Vec<BuilderExpr>,
}

/// Gate expression: a named gate or a combinator over them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeExpr {
    Name(String),
    Op(Box<ModeOp>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeOp {
    /// Kronecker product, left to right.
    Tensor(Vec<ModeExpr>),
    /// Matrix product, left to right: `product: [A, B]` is the operation
    /// "apply B, then A".
    Product(Vec<ModeExpr>),
    TensorPower { base: ModeExpr, n: u32 },
    GroverOracle { n: u32, m: usize },
    GroverDiffusion { n: u32 },
    /// Explicit matrix, row-major, entries as `[re, im]`.
    Matrix(Vec<Vec<[f64; 2]>>),
}

/// Region constraint: a named builder or an explicit polynomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuilderExpr {
    AmplitudeAtLeast { j: usize, c: f64 },
    AmplitudeAtMost { j: usize, c: f64 },
    AmplitudeBand { j: usize, lo: f64, hi: f64 },
    ImagBand { j: usize, bound: f64 },
    TailMassAtLeast { j: usize, c: f64 },
    Polynomial { kind: ConstraintKind, terms: Vec<TermRecord> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// `p(z) ≥ 0`
    Ge,
    /// `p(z) = 0`
    Eq,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperConfig {
    pub k: u32,
    pub epsilon: f64,
    pub gamma: f64,
    /// Fixed value; omit to use the default `k(ε+γ) + 0.01`.
    #[serde(default)]
    pub d: Option<f64>,
    /// Maximize d instead of fixing it.
    #[serde(default)]
    pub maximize_d: Option<MaximizeD>,
    pub barrier_degree: u32,
    #[serde(default)]
    pub multiplier_degrees: MultiplierDegrees,
    #[serde(default)]
    pub minimize_slack: bool,
    #[serde(default)]
    pub prune_step_when_k1_gamma0: bool,
    #[serde(default = "default_separation_margin")]
    pub separation_margin: f64,
    #[serde(default)]
    pub gram_form: GramForm,
}

fn default_separation_margin() -> f64 {
    1e-4
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MaximizeD {
    pub margin: f64,
    #[serde(default = "default_d_cap")]
    pub cap: f64,
}

fn default_d_cap() -> f64 {
    1e3
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BudgetConfig {
    pub samples: u64,
    pub depth: u32,
    pub delta: f64,
    pub trajectories: u64,
    pub horizon: u64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            depth: 40,
            delta: 1e-4,
            trajectories: 10_000,
            horizon: 100,
        }
    }
}

impl JobConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: JobConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        if cfg.version != 1 {
            return Err(ConfigError::invalid(
                "version",
                format!("unsupported schema version {}", cfg.version),
            ));
        }
        Ok(cfg)
    }

    /// Resolves the system (following a file reference if present) and
    /// validates hyperparameters before any solving starts.
    pub fn resolve(&self, base_dir: &Path) -> Result<(QSystem, Hyperparams), ConfigError> {
        let system_config = match &self.system {
            SystemRef::Inline(cfg) => cfg.clone(),
            SystemRef::File { file } => {
                let path = if file.is_absolute() {
                    file.clone()
                } else {
                    base_dir.join(file)
                };
                let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
                    path: path.clone(),
                    source,
                })?;
                serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                    path,
                    source,
                })?
            }
        };
        let system = system_config.build()?;
        let hyper = self.hyper.build()?;
        Ok((system, hyper))
    }
}

impl HyperConfig {
    pub fn build(&self) -> Result<Hyperparams, ConfigError> {
        let d = match (self.d, self.maximize_d) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::invalid(
                    "hyper.d",
                    "cannot both fix and maximize d",
                ))
            }
            (Some(v), None) => DChoice::Fixed(v),
            (None, Some(m)) => DChoice::Maximize {
                margin: m.margin,
                cap: m.cap,
            },
            (None, None) => {
                DChoice::Fixed(self.k as f64 * (self.epsilon + self.gamma) + 0.01)
            }
        };
        let hyper = Hyperparams {
            k: self.k,
            epsilon: self.epsilon,
            gamma: self.gamma,
            d,
            barrier_degree: self.barrier_degree,
            multiplier_degrees: self.multiplier_degrees,
            objective: if self.minimize_slack {
                ObjectiveMode::MinimizeSlack
            } else {
                ObjectiveMode::Feasibility
            },
            prune_step_when_k1_gamma0: self.prune_step_when_k1_gamma0,
            gram_form: self.gram_form,
            separation_margin: self.separation_margin,
        };
        hyper
            .validate()
            .map_err(|e| ConfigError::invalid("hyper", e.to_string()))?;
        Ok(hyper)
    }
}

impl SystemConfig {
    pub fn build(&self) -> Result<QSystem, ConfigError> {
        let dim = 1usize << self.n_qubits;
        let mut modes = Vec::with_capacity(self.modes.len());
        for (i, expr) in self.modes.iter().enumerate() {
            let m = build_mode(expr)
                .map_err(|msg| ConfigError::invalid(&format!("system.modes[{i}]"), msg))?;
            modes.push(m);
        }
        let schedule = Schedule::new(self.schedule.prefix.clone(), self.schedule.cycle.clone())
            .map_err(|e| ConfigError::invalid("system.schedule", e.to_string()))?;
        let initial = build_region(dim, &self.regions.initial, self.sphere_encoding)
            .map_err(|msg| ConfigError::invalid("system.regions.initial", msg))?;
        let unsafe_region = build_region(dim, &self.regions.unsafe_region, self.sphere_encoding)
            .map_err(|msg| ConfigError::invalid("system.regions.unsafe", msg))?;
        let state_space = build_region(dim, &self.regions.state_space, self.sphere_encoding)
            .map_err(|msg| ConfigError::invalid("system.regions.state_space", msg))?;
        QSystem::new(
            self.n_qubits,
            modes,
            schedule,
            state_space,
            initial,
            unsafe_region,
        )
        .map_err(|e| ConfigError::invalid("system", e.to_string()))
    }
}

fn build_mode(expr: &ModeExpr) -> Result<UnitaryMode, String> {
    match expr {
        ModeExpr::Name(name) => gate(name).map_err(|e| e.to_string()),
        ModeExpr::Op(op) => match op.as_ref() {
            ModeOp::Tensor(parts) => {
                if parts.is_empty() {
                    return Err("tensor of zero factors".to_string());
                }
                let mut acc = build_mode(&parts[0])?;
                for part in &parts[1..] {
                    acc = acc.tensor(&build_mode(part)?);
                }
                Ok(acc)
            }
            ModeOp::Product(parts) => {
                if parts.is_empty() {
                    return Err("product of zero factors".to_string());
                }
                let mut acc = build_mode(&parts[0])?;
                for part in &parts[1..] {
                    acc = acc.compose(&build_mode(part)?).map_err(|e| e.to_string())?;
                }
                Ok(acc)
            }
            ModeOp::TensorPower { base, n } => {
                if *n == 0 {
                    return Err("tensor power of zero".to_string());
                }
                let base = build_mode(base)?;
                Ok(qbarrier_core::qsystem::tensor_power(&base, *n))
            }
            ModeOp::GroverOracle { n, m } => grover_oracle(*n, *m).map_err(|e| e.to_string()),
            ModeOp::GroverDiffusion { n } => Ok(grover_diffusion(*n)),
            ModeOp::Matrix(rows) => {
                let size = rows.len();
                if rows.iter().any(|r| r.len() != size) {
                    return Err("matrix is not square".to_string());
                }
                let m = DMatrix::from_fn(size, size, |r, c| {
                    C64::new(rows[r][c][0], rows[r][c][1])
                });
                UnitaryMode::new(m).map_err(|e| e.to_string())
            }
        },
    }
}

fn build_region(
    dim: usize,
    exprs: &[BuilderExpr],
    sphere: SphereEncoding,
) -> Result<Region, String> {
    let mut region = Region::new(dim);
    for expr in exprs {
        region = match expr {
            BuilderExpr::AmplitudeAtLeast { j, c } => region
                .with_amplitude_at_least(*j, *c)
                .map_err(|e| e.to_string())?,
            BuilderExpr::AmplitudeAtMost { j, c } => region
                .with_amplitude_at_most(*j, *c)
                .map_err(|e| e.to_string())?,
            BuilderExpr::AmplitudeBand { j, lo, hi } => region
                .with_amplitude_band(*j, *lo, *hi)
                .map_err(|e| e.to_string())?,
            BuilderExpr::ImagBand { j, bound } => region
                .with_imag_band(*j, *bound)
                .map_err(|e| e.to_string())?,
            BuilderExpr::TailMassAtLeast { j, c } => region
                .with_tail_mass_at_least(*j, *c)
                .map_err(|e| e.to_string())?,
            BuilderExpr::Polynomial { kind, terms } => {
                let poly =
                    CPolynomial::from_term_records(dim, terms).map_err(|e| e.to_string())?;
                match kind {
                    ConstraintKind::Ge => {
                        region.push_inequality(poly).map_err(|e| e.to_string())?;
                    }
                    ConstraintKind::Eq => {
                        region.push_equality(poly).map_err(|e| e.to_string())?;
                    }
                }
                region
            }
        };
    }
    Ok(region.with_sphere(sphere))
}
