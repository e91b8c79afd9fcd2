//! Polynomials whose coefficients are affine expressions in real decision
//! variables. Barriers and multipliers live here while the constraint
//! system is assembled; no two symbolic polynomials are ever multiplied
//! (multipliers only multiply numeric region polynomials), so everything
//! stays affine.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::cpoly::{CPolynomial, MonomialKey};
use crate::hsos::conic::{LinExpr, VarId};
use crate::C64;

#[derive(Debug, Clone, Default)]
pub struct SymPoly {
    dim: usize,
    terms: BTreeMap<MonomialKey, LinExpr>,
}

impl SymPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_numeric(p: &CPolynomial) -> Self {
        let mut out = Self::zero(p.dimension());
        for (key, c) in p.terms() {
            out.add_constant(key.clone(), *c);
        }
        out
    }

    /// Fresh conjugate-flattening polynomial of total degree ≤ `degree`:
    /// self-conjugate monomials get one real variable, conjugate pairs share
    /// a (re, im) variable pair with mirrored signs.
    pub fn free_conjugate_flattening(
        dim: usize,
        degree: u32,
        label: &str,
        mut alloc: impl FnMut(String) -> VarId,
    ) -> Self {
        let basis = super::basis::MonomialBasis::new(dim, degree);
        let mut out = Self::zero(dim);
        for key in basis.keys() {
            let mirror = key.conjugate();
            if *key == mirror {
                let v = alloc(format!("{label}[{key}].re"));
                out.add_linexpr(key.clone(), &LinExpr::scaled_var(v, C64::new(1.0, 0.0)));
            } else if *key < mirror {
                let re = alloc(format!("{label}[{key}].re"));
                let im = alloc(format!("{label}[{key}].im"));
                let mut fwd = LinExpr::scaled_var(re, C64::new(1.0, 0.0));
                fwd.add_term(im, C64::new(0.0, 1.0));
                out.add_linexpr(key.clone(), &fwd);
                let mut bwd = LinExpr::scaled_var(re, C64::new(1.0, 0.0));
                bwd.add_term(im, C64::new(0.0, -1.0));
                out.add_linexpr(mirror, &bwd);
            }
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MonomialKey::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &LinExpr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &MonomialKey) -> LinExpr {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn add_linexpr(&mut self, key: MonomialKey, e: &LinExpr) {
        if e.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        slot.add_assign(e);
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_constant(&mut self, key: MonomialKey, c: C64) {
        self.add_linexpr(key, &LinExpr::constant(c));
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (key, e) in &other.terms {
            self.add_linexpr(key.clone(), e);
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (key, e) in &other.terms {
            self.add_linexpr(key.clone(), &e.scaled(C64::new(-1.0, 0.0)));
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = Self::zero(self.dim);
        for (key, e) in &self.terms {
            out.add_linexpr(key.clone(), &e.scaled(s));
        }
        out
    }

    /// Product with a numeric polynomial; coefficients stay affine.
    pub fn mul_numeric(&self, p: &CPolynomial) -> Self {
        assert_eq!(self.dim, p.dimension());
        let mut out = Self::zero(self.dim);
        for (ka, e) in &self.terms {
            for (kb, c) in p.terms() {
                out.add_linexpr(ka.mul(kb), &e.scaled(*c));
            }
        }
        out
    }

    /// Substitutes `z ← U·z`; each monomial expands numerically and the
    /// affine coefficient follows it.
    pub fn compose_linear(&self, u: &DMatrix<C64>) -> Self {
        let mut out = Self::zero(self.dim);
        for (key, e) in &self.terms {
            let mono = CPolynomial::monomial(self.dim, key.clone(), C64::new(1.0, 0.0));
            let expanded = mono.compose_linear(u).expect("dimension checked by caller");
            for (k, c) in expanded.terms() {
                out.add_linexpr(k.clone(), &e.scaled(*c));
            }
        }
        out
    }

    /// Instantiates the polynomial under a variable assignment.
    pub fn evaluate_assignment(&self, x: &[f64]) -> CPolynomial {
        let mut p = CPolynomial::zero(self.dim);
        for (key, e) in &self.terms {
            p.add_term(key.clone(), e.evaluate(x));
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hsos::basis::MonomialBasis;

    #[test]
    fn free_cf_poly_evaluates_to_cf_numeric() {
        let mut next = 0usize;
        let p = SymPoly::free_conjugate_flattening(2, 2, "b", |_| {
            let v = VarId(next);
            next += 1;
            v
        });
        // Coefficient count: C(4+2,2) = 15 monomials; 7 self-conjugate
        // (products z_i z̄_j with matching multiset plus 1) → check numerics.
        let x: Vec<f64> = (0..next).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
        let num = p.evaluate_assignment(&x);
        assert!(num.is_conjugate_flattening());
    }

    #[test]
    fn variable_count_matches_real_dimension_of_cf_space() {
        // The space of conjugate-flattening polynomials of degree ≤ d is a
        // real vector space of dimension C(2n+d, d).
        for (n, d) in [(1usize, 2u32), (2, 2), (1, 4)] {
            let mut next = 0usize;
            let _ = SymPoly::free_conjugate_flattening(n, d, "b", |_| {
                let v = VarId(next);
                next += 1;
                v
            });
            assert_eq!(next, MonomialBasis::new(n, d).len(), "n={n} d={d}");
        }
    }

    #[test]
    fn mul_numeric_distributes_over_assignment() {
        let mut next = 0usize;
        let sym = SymPoly::free_conjugate_flattening(1, 2, "m", |_| {
            let v = VarId(next);
            next += 1;
            v
        });
        let g = CPolynomial::modulus_squared(1, 0);
        let prod = sym.mul_numeric(&g);
        let x: Vec<f64> = (0..next).map(|i| 0.3 * (i as f64) - 0.7).collect();
        let lhs = prod.evaluate_assignment(&x);
        let rhs = sym.evaluate_assignment(&x).mul(&g).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn compose_commutes_with_assignment() {
        let mut next = 0usize;
        let sym = SymPoly::free_conjugate_flattening(2, 2, "b", |_| {
            let v = VarId(next);
            next += 1;
            v
        });
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(s, 0.0),
                C64::new(-s, 0.0),
            ],
        );
        let x: Vec<f64> = (0..next).map(|i| ((i % 3) as f64) * 0.5 - 0.5).collect();
        let lhs = sym.compose_linear(&h).evaluate_assignment(&x);
        let rhs = sym.evaluate_assignment(&x).compose_linear(&h).unwrap();
        for key in lhs.support().chain(rhs.support()) {
            assert!((lhs.coefficient(key) - rhs.coefficient(key)).norm() < 1e-12);
        }
    }
}
