//! Synthesis hyperparameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hsos::ops::GramForm;

#[derive(Debug, Error, PartialEq)]
pub enum HyperError {
    #[error("k must be at least 1")]
    KTooSmall,
    #[error("epsilon and gamma must be nonnegative")]
    NegativeSlack,
    #[error("d = {d} violates d > k(epsilon + gamma) = {bound}")]
    DTooSmall { d: f64, bound: f64 },
    #[error("barrier degree must be a positive even integer, got {0}")]
    OddBarrierDegree(u32),
    #[error("only one of minimize(epsilon+gamma) and maximize-d may be active")]
    ConflictingObjectives,
}

/// How the separation constant `d` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DChoice {
    /// Fixed value; must exceed `k(ε + γ)`.
    Fixed(f64),
    /// Decision variable maximized subject to `d ≥ k(ε + γ) + margin`,
    /// capped to keep the objective bounded.
    Maximize { margin: f64, cap: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ObjectiveMode {
    /// Pure feasibility query.
    #[default]
    Feasibility,
    /// `ε` and `γ` become nonnegative decision variables and `ε + γ` is
    /// minimized, subject to `k(ε + γ) ≤ d − margin`.
    MinimizeSlack,
}

/// Per-constraint-class overrides for HSOS multiplier degrees. `None` means
/// the default policy: the smallest even value `≥ δ − deg(g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MultiplierDegrees {
    pub initial: Option<u32>,
    pub unsafe_region: Option<u32>,
    pub step: Option<u32>,
    pub pair: Option<u32>,
    pub induction: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub k: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub d: DChoice,
    /// Barrier degree δ; must be even so the Gram half-degree is integral.
    pub barrier_degree: u32,
    pub multiplier_degrees: MultiplierDegrees,
    pub objective: ObjectiveMode,
    /// When enabled and `k = 1 ∧ γ = 0`, single-step growth constraints are
    /// omitted: they are implied by the phase-pair and induction conditions.
    pub prune_step_when_k1_gamma0: bool,
    /// PSD block realization for all Gram constraints.
    pub gram_form: GramForm,
    /// Extra margin demanded from the initial and unsafe separation
    /// conditions (`B ≤ −margin` on initial, `B ≥ d + margin` on unsafe).
    /// Strictly stronger than the bare conditions, so soundness is
    /// unaffected; without it, feasibility solvers return certificates that
    /// graze zero on the region boundary and no sound checker can confirm
    /// them.
    pub separation_margin: f64,
}

impl Hyperparams {
    /// Feasibility-mode parameters with `d = k(ε + γ) + 0.01`.
    pub fn new(k: u32, epsilon: f64, gamma: f64, barrier_degree: u32) -> Self {
        Self {
            k,
            epsilon,
            gamma,
            d: DChoice::Fixed(k as f64 * (epsilon + gamma) + 0.01),
            barrier_degree,
            multiplier_degrees: MultiplierDegrees::default(),
            objective: ObjectiveMode::Feasibility,
            prune_step_when_k1_gamma0: false,
            gram_form: GramForm::default(),
            separation_margin: 1e-4,
        }
    }

    pub fn with_gram_form(mut self, form: GramForm) -> Self {
        self.gram_form = form;
        self
    }

    pub fn with_separation_margin(mut self, margin: f64) -> Self {
        self.separation_margin = margin;
        self
    }

    pub fn validate(&self) -> Result<(), HyperError> {
        if self.k < 1 {
            return Err(HyperError::KTooSmall);
        }
        if self.epsilon < 0.0 || self.gamma < 0.0 || self.separation_margin < 0.0 {
            return Err(HyperError::NegativeSlack);
        }
        if self.barrier_degree == 0 || self.barrier_degree % 2 != 0 {
            return Err(HyperError::OddBarrierDegree(self.barrier_degree));
        }
        let bound = self.k as f64 * (self.epsilon + self.gamma);
        match self.d {
            DChoice::Fixed(d) => {
                if self.objective == ObjectiveMode::Feasibility && d <= bound {
                    return Err(HyperError::DTooSmall { d, bound });
                }
                if d <= 0.0 {
                    return Err(HyperError::DTooSmall { d, bound });
                }
            }
            DChoice::Maximize { .. } => {
                if self.objective == ObjectiveMode::MinimizeSlack {
                    return Err(HyperError::ConflictingObjectives);
                }
            }
        }
        Ok(())
    }

    /// The fixed `d` when one is configured.
    pub fn fixed_d(&self) -> Option<f64> {
        match self.d {
            DChoice::Fixed(d) => Some(d),
            DChoice::Maximize { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_d_clears_theorem_bound() {
        let h = Hyperparams::new(1, 0.01, 0.01, 2);
        assert_eq!(h.fixed_d(), Some(0.03));
        assert!(h.validate().is_ok());
    }

    #[test]
    fn d_at_or_below_bound_is_rejected() {
        let mut h = Hyperparams::new(2, 0.01, 0.0, 2);
        h.d = DChoice::Fixed(0.02);
        assert_eq!(
            h.validate().unwrap_err(),
            HyperError::DTooSmall { d: 0.02, bound: 0.02 }
        );
    }

    #[test]
    fn odd_degree_is_rejected() {
        let h = Hyperparams::new(1, 0.0, 0.0, 3);
        assert_eq!(h.validate().unwrap_err(), HyperError::OddBarrierDegree(3));
    }

    #[test]
    fn conflicting_objectives_rejected() {
        let mut h = Hyperparams::new(1, 0.01, 0.0, 2);
        h.d = DChoice::Maximize { margin: 0.01, cap: 100.0 };
        h.objective = ObjectiveMode::MinimizeSlack;
        assert_eq!(h.validate().unwrap_err(), HyperError::ConflictingObjectives);
    }
}
