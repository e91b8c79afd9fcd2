//! The discrete-time complex-space system: dimension, unitary modes,
//! schedule and the three semi-algebraic regions.

use nalgebra::DVector;
use thiserror::Error;

use super::gates::{GateError, UnitaryMode};
use super::region::{Region, RegionError, SphereEncoding};
use super::schedule::{Schedule, ScheduleError};
use crate::C64;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("mode {index} has dimension {got}, system expects {expected}")]
    ModeDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("region `{which}` has dimension {got}, system expects {expected}")]
    RegionDimension {
        which: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("region `{which}` is missing the unit-sphere constraint")]
    MissingSphere { which: &'static str },
    #[error("state vector has length {got}, expected {expected}")]
    StateDimension { expected: usize, got: usize },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

/// A quantum circuit as a dynamical system: `z_{t+1} = f_t(z_t)` with `f_t`
/// drawn from a finite mode set by an eventually-periodic schedule, evolving
/// on the unit sphere of `C^{2^n}`.
#[derive(Debug, Clone)]
pub struct QSystem {
    n_qubits: u32,
    dim: usize,
    modes: Vec<UnitaryMode>,
    schedule: Schedule,
    state_space: Region,
    initial: Region,
    unsafe_region: Region,
}

impl QSystem {
    pub fn new(
        n_qubits: u32,
        modes: Vec<UnitaryMode>,
        schedule: Schedule,
        state_space: Region,
        initial: Region,
        unsafe_region: Region,
    ) -> Result<Self, SystemError> {
        let dim = 1usize << n_qubits;
        for (index, mode) in modes.iter().enumerate() {
            if mode.dim() != dim {
                return Err(SystemError::ModeDimension {
                    index,
                    expected: dim,
                    got: mode.dim(),
                });
            }
        }
        if schedule.max_mode_index() >= modes.len() {
            return Err(ScheduleError::ModeOutOfRange {
                index: schedule.max_mode_index(),
                modes: modes.len(),
            }
            .into());
        }
        for (which, region) in [
            ("state_space", &state_space),
            ("initial", &initial),
            ("unsafe", &unsafe_region),
        ] {
            if region.dim() != dim {
                return Err(SystemError::RegionDimension {
                    which,
                    expected: dim,
                    got: region.dim(),
                });
            }
            if !region.contains_sphere() {
                return Err(SystemError::MissingSphere { which });
            }
        }
        Ok(Self {
            n_qubits,
            dim,
            modes,
            schedule,
            state_space,
            initial,
            unsafe_region,
        })
    }

    /// Converts a finite circuit (a list of grouped unitaries applied once,
    /// in order) into a system: the schedule prefix walks the circuit, then
    /// the identity repeats forever.
    pub fn from_circuit(
        n_qubits: u32,
        groups: Vec<UnitaryMode>,
        initial: Region,
        unsafe_region: Region,
        sphere_encoding: SphereEncoding,
    ) -> Result<Self, SystemError> {
        let dim = 1usize << n_qubits;
        let prefix: Vec<usize> = (0..groups.len()).collect();
        let identity_index = groups.len();
        let mut modes = groups;
        modes.push(UnitaryMode::identity(dim));
        let schedule = Schedule::new(prefix, vec![identity_index])?;
        let state_space = Region::new(dim).with_sphere(sphere_encoding);
        Self::new(n_qubits, modes, schedule, state_space, initial, unsafe_region)
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    /// State-vector dimension `2^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> &[UnitaryMode] {
        &self.modes
    }

    pub fn mode(&self, index: usize) -> &UnitaryMode {
        &self.modes[index]
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn state_space(&self) -> &Region {
        &self.state_space
    }

    pub fn initial(&self) -> &Region {
        &self.initial
    }

    pub fn unsafe_region(&self) -> &Region {
        &self.unsafe_region
    }

    /// One evolution step `f_t(w)`.
    pub fn step(&self, t: usize, w: &[C64]) -> Result<Vec<C64>, SystemError> {
        if w.len() != self.dim {
            return Err(SystemError::StateDimension {
                expected: self.dim,
                got: w.len(),
            });
        }
        let mode = &self.modes[self.schedule.mode_at(t)];
        let v = DVector::from_column_slice(w);
        Ok(mode.apply(&v).iter().copied().collect())
    }

    /// Product of the modes applied over `[t, t + k)`, i.e. the matrix of
    /// `f_{t+k-1} ∘ … ∘ f_t`.
    pub fn word_matrix(&self, t: usize, k: usize) -> UnitaryMode {
        let mut acc = UnitaryMode::identity(self.dim);
        for step in 0..k {
            let mode = &self.modes[self.schedule.mode_at(t + step)];
            acc = mode.compose(&acc).expect("unitary product stays unitary");
        }
        acc
    }
}
