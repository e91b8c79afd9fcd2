//! Interval branch-and-bound verification: an in-process δ-complete
//! analogue of an external nonlinear-arithmetic solver.
//!
//! The search runs over the real/imaginary box `[−1, 1]^{2N}` (states live
//! on the unit sphere, which the region constraints enforce). A box is
//! discharged when its interval evaluation proves it cannot intersect the
//! region, or proves the target nonpositive on it. A candidate point that
//! satisfies the region and violates the target by more than `delta`
//! falsifies the obligation; depth exhaustion yields an unknown verdict.

use super::obligation::{ProofObligation, Verdict};
use super::real::{Interval, RealPoly, DEFAULT_OUTWARD_EPS};
use super::sample::MEMBERSHIP_TOL;
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct IntervalOptions {
    pub delta: f64,
    pub max_depth: u32,
    /// Hard cap on processed boxes; exceeding it yields an unknown verdict.
    pub max_boxes: u64,
    /// Outward rounding applied per interval operation.
    pub outward_eps: f64,
    /// Boxes prune as verified once the target's upper bound falls to this
    /// level; it absorbs solver noise in nominally-zero targets and stays
    /// well below the 1e-6 falsification floor, so a verified verdict still
    /// implies no sampled violation above that floor.
    pub zero_tolerance: f64,
}

impl Default for IntervalOptions {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            max_depth: 40,
            max_boxes: 2_000_000,
            outward_eps: DEFAULT_OUTWARD_EPS,
            zero_tolerance: 1e-7,
        }
    }
}

struct SearchState {
    target: RealPoly,
    inequalities: Vec<RealPoly>,
    equalities: Vec<RealPoly>,
    opts: IntervalOptions,
    /// Tightest certified bound on the target over undischarged-then-pruned
    /// boxes: min over boxes of −upper(target).
    margin: f64,
    any_target_pruned: bool,
    unresolved: u64,
    processed: u64,
}

/// Branch-and-bound over the real/imaginary box.
pub fn interval_verify(ob: &ProofObligation, opts: IntervalOptions) -> Verdict {
    let dim = ob.region.dim();
    let target = match RealPoly::from_cpoly(&ob.target) {
        Ok(t) => t,
        Err(e) => {
            return Verdict::Unknown {
                reason: format!("target expansion failed: {e}"),
            }
        }
    };
    let expand = |polys: &[crate::cpoly::CPolynomial]| -> Result<Vec<RealPoly>, String> {
        polys
            .iter()
            .map(|p| RealPoly::from_cpoly(p).map_err(|e| e.to_string()))
            .collect()
    };
    let inequalities = match expand(ob.region.inequalities()) {
        Ok(v) => v,
        Err(e) => return Verdict::Unknown { reason: e },
    };
    let equalities = match expand(ob.region.equalities()) {
        Ok(v) => v,
        Err(e) => return Verdict::Unknown { reason: e },
    };

    let mut state = SearchState {
        target,
        inequalities,
        equalities,
        opts,
        margin: f64::INFINITY,
        any_target_pruned: false,
        unresolved: 0,
        processed: 0,
    };

    let root: Vec<Interval> = vec![Interval::new(-1.0, 1.0); 2 * dim];
    let mut stack: Vec<(Vec<Interval>, u32)> = vec![(root, 0)];

    while let Some((bx, depth)) = stack.pop() {
        state.processed += 1;
        if state.processed > state.opts.max_boxes {
            return Verdict::Unknown {
                reason: format!("box budget {} exhausted", state.opts.max_boxes),
            };
        }
        let eps = state.opts.outward_eps;

        // Region infeasibility pruning.
        let mut region_impossible = false;
        for g in &state.inequalities {
            let iv = g.eval_interval(&bx, eps);
            if iv.hi < 0.0 {
                region_impossible = true;
                break;
            }
        }
        if !region_impossible {
            for h in &state.equalities {
                let iv = h.eval_interval(&bx, eps);
                if iv.lo > 0.0 || iv.hi < 0.0 {
                    region_impossible = true;
                    break;
                }
            }
        }
        if region_impossible {
            continue;
        }

        // Target bound pruning.
        let t_iv = state.target.eval_interval(&bx, eps);
        if t_iv.hi <= state.opts.zero_tolerance {
            state.margin = state.margin.min(-t_iv.hi);
            state.any_target_pruned = true;
            continue;
        }

        // Falsification probe: normalize the midpoint onto the sphere and
        // confirm by point evaluation.
        if let Some(witness) = candidate_point(&bx, dim) {
            if ob.region.contains(&witness, MEMBERSHIP_TOL) {
                let value = ob
                    .target
                    .evaluate(&witness)
                    .expect("witness has region dimension")
                    .re;
                if value > state.opts.delta {
                    return Verdict::Falsified {
                        witness,
                        violation: value,
                    };
                }
            }
        }

        if depth >= state.opts.max_depth {
            state.unresolved += 1;
            continue;
        }

        // Split the widest dimension.
        let (split_dim, _) = bx
            .iter()
            .enumerate()
            .map(|(i, iv)| (i, iv.width()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite widths"))
            .expect("nonempty box");
        let mid = bx[split_dim].midpoint();
        let mut left = bx.clone();
        let mut right = bx;
        left[split_dim] = Interval::new(left[split_dim].lo, mid);
        right[split_dim] = Interval::new(mid, right[split_dim].hi);
        stack.push((left, depth + 1));
        stack.push((right, depth + 1));
    }

    if state.unresolved > 0 {
        Verdict::Unknown {
            reason: format!(
                "{} boxes unresolved at depth {}",
                state.unresolved, state.opts.max_depth
            ),
        }
    } else {
        let margin = if state.any_target_pruned {
            state.margin
        } else {
            // Every box died on region infeasibility: vacuous truth.
            f64::INFINITY
        };
        Verdict::Verified { margin }
    }
}

/// Midpoint of the box projected onto the unit sphere, when the projection
/// stays inside the box.
fn candidate_point(bx: &[Interval], dim: usize) -> Option<Vec<C64>> {
    let mid: Vec<f64> = bx.iter().map(Interval::midpoint).collect();
    let norm: f64 = mid.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-9 {
        return None;
    }
    let scaled: Vec<f64> = mid.iter().map(|v| v / norm).collect();
    for (iv, v) in bx.iter().zip(&scaled) {
        if !iv.contains(*v) {
            return None;
        }
    }
    Some(
        (0..dim)
            .map(|j| C64::new(scaled[j], scaled[dim + j]))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::CPolynomial;
    use crate::qsystem::{PhaseId, Region, SphereEncoding};
    use crate::synth::plan::PlanInstance;

    fn dummy_instance() -> PlanInstance {
        PlanInstance::Unsafe {
            phase: PhaseId::Cycle(0),
        }
    }

    #[test]
    fn constant_negative_target_verifies_at_depth_zero() {
        // The repeated-Z step obligation degenerates to the constant −ε.
        let ob = ProofObligation {
            instance: dummy_instance(),
            target: CPolynomial::real_constant(2, -0.01),
            region: Region::new(2).with_sphere(SphereEncoding::Equality),
        };
        match interval_verify(&ob, IntervalOptions::default()) {
            Verdict::Verified { margin } => {
                assert!((margin - 0.01).abs() < 1e-6, "margin {margin}");
            }
            v => panic!("expected verified, got {v:?}"),
        }
    }

    #[test]
    fn contradictory_region_verifies_vacuously() {
        // |z0|² ≥ 0.9 and |z0|² ≤ 0.1 cannot hold together on the sphere.
        let region = Region::new(2)
            .with_amplitude_at_least(0, 0.9)
            .unwrap()
            .with_amplitude_at_most(0, 0.1)
            .unwrap()
            .with_sphere(SphereEncoding::Equality);
        let ob = ProofObligation {
            instance: dummy_instance(),
            target: CPolynomial::real_constant(2, 5.0),
            region,
        };
        match interval_verify(&ob, IntervalOptions::default()) {
            Verdict::Verified { margin } => assert!(margin.is_infinite()),
            v => panic!("expected vacuous verification, got {v:?}"),
        }
    }

    #[test]
    fn positive_target_on_region_falsifies_with_witness() {
        // Target |z1|² − 0.1 over the unsafe slice |z1|² ≥ 0.2.
        let mut target = CPolynomial::modulus_squared(2, 1);
        target.add_term(crate::cpoly::MonomialKey::one(2), crate::C64::new(-0.1, 0.0));
        let region = Region::new(2)
            .with_amplitude_at_least(1, 0.2)
            .unwrap()
            .with_sphere(SphereEncoding::Equality);
        let ob = ProofObligation {
            instance: dummy_instance(),
            target,
            region: region.clone(),
        };
        match interval_verify(&ob, IntervalOptions::default()) {
            Verdict::Falsified { witness, violation } => {
                assert!(violation > 1e-4);
                assert!(region.contains(&witness, 1e-9));
            }
            v => panic!("expected falsified, got {v:?}"),
        }
    }

    #[test]
    fn true_separation_verifies_with_margin() {
        // d − B over the unsafe slice for B = −1.5 + 10|z1|², d = 0.03:
        // on |z1|² ≥ 0.2 the target is ≤ 0.03 − 0.5 = −0.47.
        let mut b = CPolynomial::real_constant(2, -1.5);
        b.add_term(
            crate::cpoly::MonomialKey::new(vec![0, 1], vec![0, 1]).unwrap(),
            crate::C64::new(10.0, 0.0),
        );
        let target = CPolynomial::real_constant(2, 0.03).sub(&b).unwrap();
        let region = Region::new(2)
            .with_amplitude_at_least(1, 0.2)
            .unwrap()
            .with_sphere(SphereEncoding::Equality);
        let ob = ProofObligation {
            instance: dummy_instance(),
            target,
            region,
        };
        match interval_verify(&ob, IntervalOptions::default()) {
            // Boxes straddling the region boundary are pruned the moment the
            // target bound turns nonpositive, so the reported margin is a
            // conservative lower bound, not the true 0.47 separation.
            Verdict::Verified { margin } => {
                assert!(margin > 0.0, "margin {margin}");
                assert!(margin < 0.55, "margin {margin}");
            }
            v => panic!("expected verified, got {v:?}"),
        }
    }
}
