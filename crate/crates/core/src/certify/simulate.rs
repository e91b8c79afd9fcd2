//! Trajectory-level safety simulation: an empirical cross-check of the
//! certificate guarantee.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sample::{sample_region, SampleError};
use crate::qsystem::QSystem;

#[derive(Debug, Clone, PartialEq)]
pub struct SafetyReport {
    pub trajectories: u64,
    pub horizon: u64,
    /// Number of visited states (including initial states) inside the
    /// unsafe region.
    pub unsafe_entries: u64,
    /// Minimum over all visited states of the largest unsafe-constraint
    /// violation: nonpositive values mean the unsafe region was entered.
    pub min_unsafe_margin: f64,
}

/// Samples initial states, iterates the schedule for `horizon` steps and
/// counts unsafe-region visits. Deterministic under a fixed seed. With
/// `horizon = 0` only the initial states are examined.
pub fn simulate_safety(
    system: &QSystem,
    trajectories: u64,
    horizon: u64,
    seed: u64,
) -> Result<SafetyReport, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = system.dim();
    let unsafe_region = system.unsafe_region();
    let mut unsafe_entries = 0u64;
    let mut min_margin = f64::INFINITY;

    let mut record = |w: &[crate::C64]| {
        // Distance to entering: the worst-violated unsafe inequality. All
        // constraints satisfied (margin ≤ 0) means the state is unsafe.
        let margin = unsafe_region
            .inequalities()
            .iter()
            .map(|g| -g.evaluate(w).expect("dimension matches").re)
            .fold(f64::NEG_INFINITY, f64::max);
        min_margin = min_margin.min(margin);
        if margin <= 1e-9 {
            unsafe_entries += 1;
        }
    };

    for _ in 0..trajectories {
        let mut w = sample_region(&mut rng, system.initial(), dim)?;
        record(&w);
        for t in 0..horizon {
            w = system.step(t as usize, &w).expect("dimension preserved");
            record(&w);
        }
    }
    Ok(SafetyReport {
        trajectories,
        horizon,
        unsafe_entries,
        min_unsafe_margin: min_margin,
    })
}
