//! Eventually-periodic schedules: a finite prefix of mode indices followed
//! by a nonempty cycle, giving `f_t` as a total function of `t`.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("cycle must be nonempty")]
    EmptyCycle,
    #[error("mode index {index} out of range ({modes} modes)")]
    ModeOutOfRange { index: usize, modes: usize },
}

/// Identifies which barrier polynomial applies at a time step: one per
/// prefix position plus one per cycle position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PhaseId {
    Prefix(usize),
    Cycle(usize),
}

impl fmt::Display for PhaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseId::Prefix(i) => write!(f, "pre{i}"),
            PhaseId::Cycle(i) => write!(f, "cyc{i}"),
        }
    }
}

/// `f_t = prefix[t]` for `t < L`, else `cycle[(t − L) mod p]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    prefix: Vec<usize>,
    cycle: Vec<usize>,
}

impl Schedule {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Result<Self, ScheduleError> {
        if cycle.is_empty() {
            return Err(ScheduleError::EmptyCycle);
        }
        Ok(Self { prefix, cycle })
    }

    /// Cycle-only schedule (no prefix).
    pub fn cyclic(cycle: Vec<usize>) -> Result<Self, ScheduleError> {
        Self::new(Vec::new(), cycle)
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    pub fn max_mode_index(&self) -> usize {
        self.prefix
            .iter()
            .chain(self.cycle.iter())
            .copied()
            .max()
            .expect("cycle is nonempty")
    }

    /// Mode index active at time `t`.
    pub fn mode_at(&self, t: usize) -> usize {
        if t < self.prefix.len() {
            self.prefix[t]
        } else {
            self.cycle[(t - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Phase (barrier index) active at time `t`.
    pub fn phase_at(&self, t: usize) -> PhaseId {
        if t < self.prefix.len() {
            PhaseId::Prefix(t)
        } else {
            PhaseId::Cycle((t - self.prefix.len()) % self.cycle.len())
        }
    }

    /// All phases in canonical order: prefix positions then cycle positions.
    pub fn phases(&self) -> Vec<PhaseId> {
        (0..self.prefix.len())
            .map(PhaseId::Prefix)
            .chain((0..self.cycle.len()).map(PhaseId::Cycle))
            .collect()
    }

    /// Mode index at a phase.
    pub fn mode_at_phase(&self, phase: PhaseId) -> usize {
        match phase {
            PhaseId::Prefix(i) => self.prefix[i],
            PhaseId::Cycle(i) => self.cycle[i],
        }
    }

    /// Phase reached one step after `phase`.
    pub fn successor(&self, phase: PhaseId) -> PhaseId {
        match phase {
            PhaseId::Prefix(i) if i + 1 < self.prefix.len() => PhaseId::Prefix(i + 1),
            PhaseId::Prefix(_) => PhaseId::Cycle(0),
            PhaseId::Cycle(i) => PhaseId::Cycle((i + 1) % self.cycle.len()),
        }
    }
}
