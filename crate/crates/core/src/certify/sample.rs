//! Sampling-based falsification and region samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use thiserror::Error;

use super::obligation::{ProofObligation, Verdict};
use crate::qsystem::{Region, RegionHint};
use crate::C64;

/// Region membership tolerance for sampled witnesses.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Acceptance-rate floor below which rejection sampling is abandoned.
pub const THIN_REGION_RATE: f64 = 1e-5;
/// Draws spent estimating the acceptance rate before giving up.
const RATE_PROBE_DRAWS: u64 = 20_000;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error(
        "region too thin for rejection sampling (acceptance rate < {THIN_REGION_RATE:e}) and no \
         builder hints available for direct parameterization"
    )]
    ThinRegion,
    #[error("direct parameterization failed to produce a member point")]
    DirectSamplingFailed,
}

/// Uniform point on the unit sphere of `C^dim` via normalized Gaussians.
pub fn sample_unit_sphere(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    loop {
        let mut w: Vec<C64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for z in &mut w {
                *z /= norm;
            }
            return w;
        }
    }
}

/// Draws a sphere point inside the region. Starts with rejection sampling;
/// if the empirical acceptance rate collapses, switches to the direct
/// parameterization encoded in the region's builder hints.
pub fn sample_region(
    rng: &mut ChaCha8Rng,
    region: &Region,
    dim: usize,
) -> Result<Vec<C64>, SampleError> {
    let mut drawn = 0u64;
    loop {
        let w = sample_unit_sphere(rng, dim);
        drawn += 1;
        if region.contains(&w, MEMBERSHIP_TOL) {
            return Ok(w);
        }
        if drawn >= RATE_PROBE_DRAWS {
            break;
        }
    }
    if region.hints().is_empty() {
        return Err(SampleError::ThinRegion);
    }
    for _ in 0..100_000 {
        if let Some(w) = sample_from_hints(rng, region, dim) {
            return Ok(w);
        }
    }
    Err(SampleError::DirectSamplingFailed)
}

/// One attempt at direct parameterization: draw squared amplitudes within
/// the hinted bands, spread the leftover mass over unconstrained indices,
/// pick phases compatible with imaginary-part bands, then verify membership
/// exactly.
fn sample_from_hints(rng: &mut ChaCha8Rng, region: &Region, dim: usize) -> Option<Vec<C64>> {
    let mut lo = vec![0.0f64; dim];
    let mut hi = vec![1.0f64; dim];
    let mut constrained = vec![false; dim];
    let mut imag_bound = vec![f64::INFINITY; dim];
    for hint in region.hints() {
        match *hint {
            RegionHint::AmplitudeAtLeast { j, c } => {
                lo[j] = lo[j].max(c);
                constrained[j] = true;
            }
            RegionHint::AmplitudeAtMost { j, c } => {
                hi[j] = hi[j].min(c);
                constrained[j] = true;
            }
            RegionHint::AmplitudeBand { j, lo: l, hi: h } => {
                lo[j] = lo[j].max(l);
                hi[j] = hi[j].min(h);
                constrained[j] = true;
            }
            RegionHint::ImagBand { j, bound } => {
                imag_bound[j] = imag_bound[j].min(bound);
            }
            // Tail mass is left to the final membership check.
            RegionHint::TailMassAtLeast { .. } => {}
        }
    }

    let mut s = vec![0.0f64; dim];
    let mut used = 0.0;
    for j in 0..dim {
        if constrained[j] {
            if lo[j] > hi[j] {
                return None;
            }
            s[j] = rng.gen_range(lo[j]..=hi[j]);
            used += s[j];
        }
    }
    if used > 1.0 + 1e-12 {
        return None;
    }
    let free: Vec<usize> = (0..dim).filter(|&j| !constrained[j]).collect();
    if free.is_empty() {
        // Renormalize the constrained draw onto the simplex; the final
        // membership check rejects draws the bands cannot absorb.
        if used <= 0.0 {
            return None;
        }
        for v in &mut s {
            *v /= used;
        }
    } else {
        let remaining = 1.0 - used;
        let weights: Vec<f64> = free.iter().map(|_| Exp1.sample(rng)).collect();
        let total: f64 = weights.iter().sum();
        for (&j, wgt) in free.iter().zip(weights) {
            s[j] = remaining * wgt / total;
        }
    }

    let mut w = Vec::with_capacity(dim);
    for j in 0..dim {
        let r = s[j].max(0.0).sqrt();
        let theta = if imag_bound[j].is_infinite() || r <= imag_bound[j] {
            rng.gen_range(0.0..std::f64::consts::TAU)
        } else {
            // |r sin θ| ≤ bound: sample within the allowed arcs around 0 or π.
            let max_angle = (imag_bound[j] / r).asin();
            let base = rng.gen_range(-max_angle..=max_angle);
            if rng.gen_bool(0.5) {
                base
            } else {
                std::f64::consts::PI - base
            }
        };
        w.push(C64::new(r * theta.cos(), r * theta.sin()));
    }
    // Exact renormalization absorbs accumulated floating error.
    let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= 1e-12 {
        return None;
    }
    for z in &mut w {
        *z /= norm;
    }
    region.contains(&w, MEMBERSHIP_TOL).then_some(w)
}

/// Random falsification: draws region points and hunts for a target value
/// above `tol`. Sampling can falsify but never verify; with the budget
/// exhausted the verdict is unknown.
pub fn sample_falsify(
    ob: &ProofObligation,
    samples: u64,
    tol: f64,
    seed: u64,
) -> Result<Verdict, SampleError> {
    let dim = ob.region.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = 0u64;
    let mut drawn = 0u64;
    let mut use_hints = false;
    let mut max_seen = f64::NEG_INFINITY;

    while accepted < samples {
        let w = if use_hints {
            match sample_from_hints(&mut rng, &ob.region, dim) {
                Some(w) => w,
                None => continue,
            }
        } else {
            drawn += 1;
            let w = sample_unit_sphere(&mut rng, dim);
            if !ob.region.contains(&w, MEMBERSHIP_TOL) {
                if drawn >= RATE_PROBE_DRAWS
                    && (accepted as f64) < THIN_REGION_RATE * drawn as f64
                {
                    if ob.region.hints().is_empty() {
                        return Err(SampleError::ThinRegion);
                    }
                    use_hints = true;
                }
                continue;
            }
            w
        };
        accepted += 1;
        let value = ob.target.evaluate(&w).expect("dimension matches region").re;
        max_seen = max_seen.max(value);
        if value > tol {
            return Ok(Verdict::Falsified {
                witness: w,
                violation: value,
            });
        }
    }
    Ok(Verdict::Unknown {
        reason: format!(
            "no violation above {tol:e} in {samples} samples (max target value {max_seen:.3e})"
        ),
    })
}
