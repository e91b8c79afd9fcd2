//! Half-size real Gram parameterization over the real-combination basis.
//!
//! For a conjugation-closed monomial basis `v`, replace each conjugate pair
//! `(m, m̄)` by the real-valued combinations `(m + m̄)/√2` and
//! `(m − m̄)/(i√2)`; self-conjugate monomials are real-valued already. The
//! transformed vector `v'(z)` is real at every point, so
//! `v'ᵀ(Im Q')v' = 0` for any Hermitian `Q'` and every Hermitian-PSD Gram
//! over `v` is equivalent to a real symmetric PSD Gram over `v'` of the
//! same (not doubled) dimension:
//!
//! `{v†Qv : Q ⪰ 0 Hermitian} = {v'ᵀ M v' : M ⪰ 0 real symmetric}`.
//!
//! Both cones therefore parameterize exactly the Hermitian sums of squares;
//! this form just costs a quarter of the PSD block area after the
//! alternative's 2m×2m realification.

use super::basis::MonomialBasis;
use super::conic::{LinExpr, PsdBlock, RealAffine, VarId};
use super::sympoly::SymPoly;
use crate::cpoly::{CPolynomial, MonomialKey};
use crate::C64;

/// One element of the real-combination basis.
#[derive(Debug, Clone)]
enum RealBasisElement {
    /// Self-conjugate monomial, real-valued as is.
    SelfConjugate(MonomialKey),
    /// `(m + m̄)/√2`.
    PairSum(MonomialKey),
    /// `(m − m̄)/(i√2) = −i(m − m̄)/√2`.
    PairDifference(MonomialKey),
}

impl RealBasisElement {
    /// The element as a (real-valued) polynomial.
    fn to_poly(&self, dim: usize) -> CPolynomial {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            RealBasisElement::SelfConjugate(m) => {
                CPolynomial::monomial(dim, m.clone(), C64::new(1.0, 0.0))
            }
            RealBasisElement::PairSum(m) => CPolynomial::from_terms(
                dim,
                vec![
                    (m.clone(), C64::new(s, 0.0)),
                    (m.conjugate(), C64::new(s, 0.0)),
                ],
            ),
            RealBasisElement::PairDifference(m) => CPolynomial::from_terms(
                dim,
                vec![
                    (m.clone(), C64::new(0.0, -s)),
                    (m.conjugate(), C64::new(0.0, s)),
                ],
            ),
        }
    }
}

/// Symbolic real symmetric Gram over the real-combination basis: one
/// decision variable per upper-triangle entry.
#[derive(Debug, Clone)]
pub struct RealGram {
    dim: usize,
    elements: Vec<RealBasisElement>,
    /// Upper triangle, column-major.
    vars: Vec<VarId>,
}

impl RealGram {
    pub fn new(
        basis: &MonomialBasis,
        label: &str,
        mut alloc: impl FnMut(String) -> VarId,
    ) -> Self {
        let mut elements = Vec::with_capacity(basis.len());
        for key in basis.keys() {
            let mirror = key.conjugate();
            if *key == mirror {
                elements.push(RealBasisElement::SelfConjugate(key.clone()));
            } else if *key < mirror {
                elements.push(RealBasisElement::PairSum(key.clone()));
                elements.push(RealBasisElement::PairDifference(key.clone()));
            }
        }
        debug_assert_eq!(elements.len(), basis.len());
        let size = elements.len();
        let mut vars = Vec::with_capacity(size * (size + 1) / 2);
        for col in 0..size {
            for row in 0..=col {
                vars.push(alloc(format!("{label}[{row},{col}]")));
            }
        }
        Self {
            dim: basis.dimension(),
            elements,
            vars,
        }
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    fn var(&self, row: usize, col: usize) -> VarId {
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        self.vars[c * (c + 1) / 2 + r]
    }

    /// Expands `v'ᵀ M v'` with symbolic coefficients.
    pub fn to_sympoly(&self) -> SymPoly {
        let mut out = SymPoly::zero(self.dim);
        // Cache element polynomials; they have at most two terms each.
        let polys: Vec<CPolynomial> =
            self.elements.iter().map(|e| e.to_poly(self.dim)).collect();
        for j in 0..self.size() {
            for k in 0..self.size() {
                let var = self.var(j, k);
                let prod = polys[j].mul(&polys[k]).expect("same dimension");
                for (key, c) in prod.terms() {
                    out.add_linexpr(key.clone(), &LinExpr::scaled_var(var, *c));
                }
            }
        }
        out
    }

    /// The PSD block is the variable matrix itself; no embedding needed.
    pub fn psd_block(&self, label: impl Into<String>) -> PsdBlock {
        let size = self.size();
        let entries = self.vars.iter().map(|&v| RealAffine::var(v)).collect();
        PsdBlock {
            dim: size,
            entries,
            label: label.into(),
        }
    }

    /// Numeric real Gram under an assignment.
    pub fn evaluate(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let size = self.size();
        nalgebra::DMatrix::from_fn(size, size, |r, c| x[self.var(r, c).0])
    }

    /// Reconstructs the represented polynomial under an assignment.
    pub fn evaluate_poly(&self, x: &[f64]) -> CPolynomial {
        self.to_sympoly().evaluate_assignment(x)
    }
}
