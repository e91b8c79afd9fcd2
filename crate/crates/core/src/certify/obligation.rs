//! Proof obligations: the certificate conditions restated as violation
//! queries.
//!
//! Each obligation carries a target polynomial and a region; the condition
//! is falsified exactly when some region point makes the target positive.

use thiserror::Error;

use crate::cpoly::{CPolynomial, MonomialKey};
use crate::qsystem::{PhaseId, QSystem, Region};
use crate::synth::certificate::BarrierCertificate;
use crate::synth::plan::{phase_plan, PlanInstance};
use crate::C64;

#[derive(Debug, Error)]
pub enum ObligationError {
    #[error("certificate phases {cert:?} do not match schedule phases {schedule:?}")]
    PhaseMismatch {
        cert: Vec<PhaseId>,
        schedule: Vec<PhaseId>,
    },
    #[error("certificate is empty")]
    EmptyCertificate,
}

/// A single violation query: find `z` in `region` with `target(z) > 0`.
#[derive(Debug, Clone)]
pub struct ProofObligation {
    /// Condition id: the instantiated condition this obligation encodes.
    pub instance: PlanInstance,
    /// Conjugate-flattening polynomial; positive values witness violations.
    pub target: CPolynomial,
    pub region: Region,
}

impl ProofObligation {
    pub fn id(&self) -> String {
        self.instance.to_string()
    }
}

/// Instantiates one obligation per condition of the k-inductive certificate:
/// initial nonpositivity, unsafe separation per phase, per-(phase, mode)
/// step growth, consecutive-phase change, and per-word k-step induction.
pub fn obligations(
    system: &QSystem,
    cert: &BarrierCertificate,
) -> Result<Vec<ProofObligation>, ObligationError> {
    if cert.phase_barriers.is_empty() {
        return Err(ObligationError::EmptyCertificate);
    }
    let plan = phase_plan(system.schedule(), cert.constants.k);
    let cert_phases: Vec<PhaseId> = cert.phase_barriers.keys().copied().collect();
    if cert_phases != plan.phases {
        return Err(ObligationError::PhaseMismatch {
            cert: cert_phases,
            schedule: plan.phases,
        });
    }
    let dim = system.dim();
    let constant =
        |v: f64| CPolynomial::monomial(dim, MonomialKey::one(dim), C64::new(v, 0.0));
    let barrier = |phase: &PhaseId| &cert.phase_barriers[phase];

    let mut out = Vec::new();
    for instance in plan.instances {
        let (target, region) = match &instance {
            PlanInstance::Initial { phase } => {
                (barrier(phase).clone(), system.initial().clone())
            }
            PlanInstance::Unsafe { phase } => (
                constant(cert.constants.d).sub(barrier(phase)).unwrap(),
                system.unsafe_region().clone(),
            ),
            PlanInstance::Step { phase, mode } => {
                let b = barrier(phase);
                let composed = b.compose_linear(system.mode(*mode).matrix()).unwrap();
                (
                    composed
                        .sub(b)
                        .unwrap()
                        .sub(&constant(cert.constants.epsilon))
                        .unwrap(),
                    system.state_space().clone(),
                )
            }
            PlanInstance::Pair { from, to } => (
                barrier(to)
                    .sub(barrier(from))
                    .unwrap()
                    .sub(&constant(cert.constants.gamma))
                    .unwrap(),
                system.state_space().clone(),
            ),
            PlanInstance::Induction { start, end, word } => {
                let mut w = nalgebra::DMatrix::<C64>::identity(dim, dim);
                for &m in word {
                    w = system.mode(m).matrix() * w;
                }
                let composed = barrier(end).compose_linear(&w).unwrap();
                (
                    composed.sub(barrier(start)).unwrap(),
                    system.state_space().clone(),
                )
            }
        };
        out.push(ProofObligation {
            instance,
            target,
            region,
        });
    }
    Ok(out)
}

/// Checker verdict for one obligation.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// No violation exists; `margin` bounds how far the target stays below
    /// zero over the region (infinite when the region itself is empty).
    Verified { margin: f64 },
    /// Concrete region point violating the condition.
    Falsified { witness: Vec<C64>, violation: f64 },
    /// Budget exhausted without a decision.
    Unknown { reason: String },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self, Verdict::Falsified { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsystem::{gate, tensor_power, Region, Schedule, SphereEncoding};
    use crate::synth::certificate::{Constants, Provenance};
    use std::collections::BTreeMap;

    fn region(dim: usize) -> Region {
        Region::new(dim).with_sphere(SphereEncoding::Equality)
    }

    fn z_gate_system() -> QSystem {
        let initial = Region::new(2)
            .with_amplitude_at_least(0, 0.9)
            .unwrap()
            .with_sphere(SphereEncoding::Equality);
        let unsafe_region = Region::new(2)
            .with_amplitude_at_least(1, 0.2)
            .unwrap()
            .with_sphere(SphereEncoding::Equality);
        QSystem::new(
            1,
            vec![gate("Z").unwrap()],
            Schedule::cyclic(vec![0]).unwrap(),
            region(2),
            initial,
            unsafe_region,
        )
        .unwrap()
    }

    fn certificate_for(phases: Vec<PhaseId>, dim: usize, k: u32) -> BarrierCertificate {
        let mut phase_barriers = BTreeMap::new();
        for p in phases {
            phase_barriers.insert(p, CPolynomial::real_constant(dim, -1.0));
        }
        BarrierCertificate {
            phase_barriers,
            constants: Constants {
                k,
                epsilon: 0.01,
                gamma: 0.01,
                d: 0.03,
            },
            provenance: Provenance::default(),
        }
    }

    #[test]
    fn z_gate_setup_has_five_obligations() {
        let sys = z_gate_system();
        let cert = certificate_for(vec![PhaseId::Cycle(0)], 2, 1);
        let obs = obligations(&sys, &cert).unwrap();
        assert_eq!(obs.len(), 5);
    }

    #[test]
    fn alternating_two_phase_k2_has_eight_obligations() {
        let x = tensor_power(&gate("X").unwrap(), 2);
        let z = tensor_power(&gate("Z").unwrap(), 2);
        let sys = QSystem::new(
            2,
            vec![x, z],
            Schedule::cyclic(vec![0, 1]).unwrap(),
            region(4),
            region(4),
            region(4),
        )
        .unwrap();
        let cert = certificate_for(vec![PhaseId::Cycle(0), PhaseId::Cycle(1)], 4, 2);
        let obs = obligations(&sys, &cert).unwrap();
        // 1 initial + 2 unsafe + 2 step + 2 pair + 1 induction.
        assert_eq!(obs.len(), 8);
    }

    #[test]
    fn wrong_phase_count_is_an_error() {
        let sys = z_gate_system();
        let cert = certificate_for(vec![PhaseId::Cycle(0), PhaseId::Cycle(1)], 2, 1);
        assert!(matches!(
            obligations(&sys, &cert),
            Err(ObligationError::PhaseMismatch { .. })
        ));
    }

    #[test]
    fn step_target_subtracts_epsilon() {
        let sys = z_gate_system();
        let cert = certificate_for(vec![PhaseId::Cycle(0)], 2, 1);
        let obs = obligations(&sys, &cert).unwrap();
        let step = obs
            .iter()
            .find(|o| matches!(o.instance, PlanInstance::Step { .. }))
            .unwrap();
        // Constant barrier: B(Zz) − B(z) − ε = −ε.
        let v = step
            .target
            .evaluate(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
            .unwrap();
        assert!((v.re + 0.01).abs() < 1e-12);
    }
}
