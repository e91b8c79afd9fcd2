//! Complex semi-algebraic regions and the builders used by the case studies.
//!
//! A region is a conjunction of element-wise constraints `g_j(z) ≥ 0` and
//! `h_j(z) = 0` over conjugate-flattening polynomials. Builders also attach
//! hints that let the samplers parameterize thin regions directly instead of
//! relying on rejection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpoly::{CPolynomial, MonomialKey};
use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error("amplitude index {j} out of range for dimension {dim}")]
    IndexOutOfRange { j: usize, dim: usize },
    #[error("inverted bounds: lo {lo} > hi {hi}")]
    InvertedBounds { lo: f64, hi: f64 },
    #[error("region polynomial is not conjugate-flattening: {0}")]
    NotConjugateFlattening(String),
}

/// Structural description of one builder constraint; used for direct
/// sampling when rejection is hopeless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RegionHint {
    AmplitudeAtLeast { j: usize, c: f64 },
    AmplitudeAtMost { j: usize, c: f64 },
    AmplitudeBand { j: usize, lo: f64, hi: f64 },
    ImagBand { j: usize, bound: f64 },
    TailMassAtLeast { j: usize, c: f64 },
}

/// Semi-algebraic set `{z : g(z) ≥ 0 element-wise, h(z) = 0}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region {
    dim: usize,
    inequalities: Vec<CPolynomial>,
    equalities: Vec<CPolynomial>,
    hints: Vec<RegionHint>,
}

impl Region {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[CPolynomial] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[CPolynomial] {
        &self.equalities
    }

    pub fn hints(&self) -> &[RegionHint] {
        &self.hints
    }

    pub fn push_inequality(&mut self, g: CPolynomial) -> Result<(), RegionError> {
        if !g.is_conjugate_flattening() {
            return Err(RegionError::NotConjugateFlattening(g.to_string()));
        }
        self.inequalities.push(g);
        Ok(())
    }

    pub fn push_equality(&mut self, h: CPolynomial) -> Result<(), RegionError> {
        if !h.is_conjugate_flattening() {
            return Err(RegionError::NotConjugateFlattening(h.to_string()));
        }
        self.equalities.push(h);
        Ok(())
    }

    fn push_hint(&mut self, hint: RegionHint) {
        self.hints.push(hint);
    }

    /// Whether the sphere equality `Σ|z_j|² − 1 = 0` is present (in either
    /// the equality list or as the two-inequality encoding).
    pub fn contains_sphere(&self) -> bool {
        let sphere = sphere_polynomial(self.dim);
        let eq_hit = self.equalities.iter().any(|h| *h == sphere);
        let ineq_hit = self.inequalities.iter().any(|g| *g == sphere)
            && self.inequalities.iter().any(|g| *g == sphere.neg());
        eq_hit || ineq_hit
    }

    /// Point membership within tolerance.
    pub fn contains(&self, w: &[C64], tol: f64) -> bool {
        self.inequalities
            .iter()
            .all(|g| g.evaluate(w).map(|v| v.re >= -tol).unwrap_or(false))
            && self
                .equalities
                .iter()
                .all(|h| h.evaluate(w).map(|v| v.re.abs() <= tol).unwrap_or(false))
    }

    // Builders. Each appends conjugate-flattening polynomials plus a hint.

    /// `|z_j|² − c ≥ 0`.
    pub fn with_amplitude_at_least(mut self, j: usize, c: f64) -> Result<Self, RegionError> {
        self.check_index(j)?;
        let mut g = CPolynomial::modulus_squared(self.dim, j);
        g.add_term(MonomialKey::one(self.dim), C64::new(-c, 0.0));
        self.push_inequality(g)?;
        self.push_hint(RegionHint::AmplitudeAtLeast { j, c });
        Ok(self)
    }

    /// `c − |z_j|² ≥ 0`.
    pub fn with_amplitude_at_most(mut self, j: usize, c: f64) -> Result<Self, RegionError> {
        self.check_index(j)?;
        let mut g = CPolynomial::modulus_squared(self.dim, j).neg();
        g.add_term(MonomialKey::one(self.dim), C64::new(c, 0.0));
        self.push_inequality(g)?;
        self.push_hint(RegionHint::AmplitudeAtMost { j, c });
        Ok(self)
    }

    /// `lo ≤ |z_j|² ≤ hi` as two inequalities plus their product. The
    /// product is implied by the pair, so the set is unchanged, but it
    /// admits the interval-style certificates that keep band constraints
    /// numerically tractable for the synthesizer.
    pub fn with_amplitude_band(mut self, j: usize, lo: f64, hi: f64) -> Result<Self, RegionError> {
        self.check_index(j)?;
        if lo > hi {
            return Err(RegionError::InvertedBounds { lo, hi });
        }
        let m = CPolynomial::modulus_squared(self.dim, j);
        let mut lower = m.clone();
        lower.add_term(MonomialKey::one(self.dim), C64::new(-lo, 0.0));
        let mut upper = m.neg();
        upper.add_term(MonomialKey::one(self.dim), C64::new(hi, 0.0));
        let product = lower.mul(&upper).expect("same dimension");
        self.push_inequality(lower)?;
        self.push_inequality(upper)?;
        self.push_inequality(product)?;
        self.push_hint(RegionHint::AmplitudeBand { j, lo, hi });
        Ok(self)
    }

    /// `−bound ≤ Im(z_j) ≤ bound`, written with the conjugate-flattening
    /// combination `(z_j − z̄_j)/(2i)` whose coefficients are `∓i/2`.
    pub fn with_imag_band(mut self, j: usize, bound: f64) -> Result<Self, RegionError> {
        self.check_index(j)?;
        if bound < 0.0 {
            return Err(RegionError::InvertedBounds {
                lo: -bound,
                hi: bound,
            });
        }
        // Im(z_j) = (z_j − z̄_j)/(2i) = −(i/2)·z_j + (i/2)·z̄_j
        let imag = CPolynomial::from_terms(
            self.dim,
            vec![
                (MonomialKey::var(self.dim, j), C64::new(0.0, -0.5)),
                (MonomialKey::conj_var(self.dim, j), C64::new(0.0, 0.5)),
            ],
        );
        let mut upper = imag.neg();
        upper.add_term(MonomialKey::one(self.dim), C64::new(bound, 0.0));
        let mut lower = imag;
        lower.add_term(MonomialKey::one(self.dim), C64::new(bound, 0.0));
        // As above: the product bound² − Im(z_j)² keeps the pair usable.
        let product = lower.mul(&upper).expect("same dimension");
        self.push_inequality(upper)?;
        self.push_inequality(lower)?;
        self.push_inequality(product)?;
        self.push_hint(RegionHint::ImagBand { j, bound });
        Ok(self)
    }

    /// `Σ_{i≠j} |z_i|² − c ≥ 0`.
    pub fn with_tail_mass_at_least(mut self, j: usize, c: f64) -> Result<Self, RegionError> {
        self.check_index(j)?;
        let mut g = CPolynomial::zero(self.dim);
        for i in 0..self.dim {
            if i != j {
                g = g.add(&CPolynomial::modulus_squared(self.dim, i)).unwrap();
            }
        }
        g.add_term(MonomialKey::one(self.dim), C64::new(-c, 0.0));
        self.push_inequality(g)?;
        self.push_hint(RegionHint::TailMassAtLeast { j, c });
        Ok(self)
    }

    /// Adds the unit-sphere constraint, either as one equality (the default,
    /// enabling sign-free multipliers) or as the two-inequality encoding.
    pub fn with_sphere(mut self, encoding: SphereEncoding) -> Self {
        let sphere = sphere_polynomial(self.dim);
        match encoding {
            SphereEncoding::Equality => {
                self.equalities.push(sphere);
            }
            SphereEncoding::TwoInequalities => {
                self.inequalities.push(sphere.clone());
                self.inequalities.push(sphere.neg());
            }
        }
        self
    }

    fn check_index(&self, j: usize) -> Result<(), RegionError> {
        if j >= self.dim {
            return Err(RegionError::IndexOutOfRange { j, dim: self.dim });
        }
        Ok(())
    }
}

/// How the state-space sphere enters the constraint lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SphereEncoding {
    #[default]
    Equality,
    TwoInequalities,
}

/// `Σ_j |z_j|² − 1`.
pub fn sphere_polynomial(dim: usize) -> CPolynomial {
    let mut p = CPolynomial::real_constant(dim, -1.0);
    for j in 0..dim {
        p = p.add(&CPolynomial::modulus_squared(dim, j)).unwrap();
    }
    p
}
