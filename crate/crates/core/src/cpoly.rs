//! Sparse multivariate polynomials over the variables `z_0..z_{n-1}` and
//! their conjugates, with complex coefficients.
//!
//! A term is indexed by a [`MonomialKey`] `(α, β)` and represents
//! `c · z^α · z̄^β`. A polynomial whose coefficients satisfy
//! `c_{β,α} = conj(c_{α,β})` takes real values everywhere; such polynomials
//! are called conjugate-flattening and carry all barriers, multipliers and
//! region constraints in this crate.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{C64, COEFF_DROP_TOL};

/// Coefficient symmetry tolerance for [`CPolynomial::is_conjugate_flattening`].
pub const CF_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CpolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent index lengths differ: alpha has {alpha}, beta has {beta}")]
    IndexLengthMismatch { alpha: usize, beta: usize },
}

/// Exponent pair `(α, β)` for the monomial `z^α z̄^β`.
///
/// Ordering is graded lexicographic over the concatenated `(α, β)` index,
/// which fixes a deterministic order for printing and basis enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialKey {
    alpha: Vec<u32>,
    beta: Vec<u32>,
}

impl MonomialKey {
    pub fn new(alpha: Vec<u32>, beta: Vec<u32>) -> Result<Self, CpolyError> {
        if alpha.len() != beta.len() {
            return Err(CpolyError::IndexLengthMismatch {
                alpha: alpha.len(),
                beta: beta.len(),
            });
        }
        Ok(Self { alpha, beta })
    }

    /// The constant monomial `1` in `n` variables.
    pub fn one(n: usize) -> Self {
        Self {
            alpha: vec![0; n],
            beta: vec![0; n],
        }
    }

    /// The monomial `z_j`.
    pub fn var(n: usize, j: usize) -> Self {
        let mut key = Self::one(n);
        key.alpha[j] = 1;
        key
    }

    /// The monomial `z̄_j`.
    pub fn conj_var(n: usize, j: usize) -> Self {
        let mut key = Self::one(n);
        key.beta[j] = 1;
        key
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn beta(&self) -> &[u32] {
        &self.beta
    }

    pub fn dimension(&self) -> usize {
        self.alpha.len()
    }

    /// Total degree `|α| + |β|`.
    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum::<u32>() + self.beta.iter().sum::<u32>()
    }

    /// Swaps `α` and `β`; this is the key of the conjugate monomial.
    pub fn conjugate(&self) -> Self {
        Self {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
        }
    }

    /// Whether the monomial equals its own conjugate (`α = β`).
    pub fn is_self_conjugate(&self) -> bool {
        self.alpha == self.beta
    }

    /// Product of two monomials (exponents add).
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            alpha: self
                .alpha
                .iter()
                .zip(&other.alpha)
                .map(|(a, b)| a + b)
                .collect(),
            beta: self
                .beta
                .iter()
                .zip(&other.beta)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl PartialOrd for MonomialKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MonomialKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // Graded, then reverse-lexicographic on the concatenated index, so
        // that iteration yields 1, z0, .., z̄0, .. in the usual reading order.
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.alpha.cmp(&self.alpha))
            .then_with(|| other.beta.cmp(&self.beta))
    }
}

impl fmt::Display for MonomialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, &e) in self.alpha.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("z{j}")),
                _ => parts.push(format!("z{j}^{e}")),
            }
        }
        for (j, &e) in self.beta.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("zb{j}")),
                _ => parts.push(format!("zb{j}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// One serialized polynomial term, `coeff · z^alpha · z̄^beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    /// Real and imaginary part.
    pub coeff: [f64; 2],
}

/// Sparse polynomial in `z_0..z_{n-1}` and `z̄_0..z̄_{n-1}` with complex
/// coefficients, kept in canonical form (no stored coefficient has magnitude
/// below [`COEFF_DROP_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct CPolynomial {
    dim: usize,
    terms: BTreeMap<MonomialKey, C64>,
}

impl CPolynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MonomialKey::one(dim), c);
        p
    }

    pub fn real_constant(dim: usize, c: f64) -> Self {
        Self::constant(dim, C64::new(c, 0.0))
    }

    /// The variable `z_j`.
    pub fn var(dim: usize, j: usize) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MonomialKey::var(dim, j), C64::new(1.0, 0.0));
        p
    }

    /// The conjugate variable `z̄_j`.
    pub fn conj_var(dim: usize, j: usize) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MonomialKey::conj_var(dim, j), C64::new(1.0, 0.0));
        p
    }

    /// `|z_j|² = z_j z̄_j`.
    pub fn modulus_squared(dim: usize, j: usize) -> Self {
        let mut key = MonomialKey::one(dim);
        key.alpha[j] = 1;
        key.beta[j] = 1;
        Self::monomial(dim, key, C64::new(1.0, 0.0))
    }

    pub fn monomial(dim: usize, key: MonomialKey, coeff: C64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(key, coeff);
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MonomialKey, C64)>,
    {
        let mut p = Self::zero(dim);
        for (key, c) in terms {
            p.add_term(key, c);
        }
        p
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Maximum total degree over stored keys; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MonomialKey::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, key: &MonomialKey) -> C64 {
        self.terms.get(key).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &C64)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &MonomialKey> {
        self.terms.keys()
    }

    /// Accumulates a term, restoring canonical sparse form.
    pub fn add_term(&mut self, key: MonomialKey, coeff: C64) {
        debug_assert_eq!(key.dimension(), self.dim);
        let entry = self.terms.entry(key.clone()).or_insert(C64::new(0.0, 0.0));
        *entry += coeff;
        if entry.norm() < COEFF_DROP_TOL {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CpolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.add_term(key.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CpolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        if c.norm() < COEFF_DROP_TOL {
            return Self::zero(self.dim);
        }
        let mut out = Self::zero(self.dim);
        for (key, v) in &self.terms {
            out.add_term(key.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CpolyError> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ka.mul(kb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Termwise conjugation: swaps `α ↔ β` and conjugates coefficients, so
    /// that `conjugate(p)(w) = conj(p(w))` for every point `w`.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (key, c) in &self.terms {
            out.add_term(key.conjugate(), c.conj());
        }
        out
    }

    /// `(p + conjugate(p)) / 2`; the conjugate-flattening part of `p`.
    pub fn symmetrize(&self) -> Self {
        let mut out = self.clone();
        for (key, c) in &self.conjugate().terms {
            out.add_term(key.clone(), *c);
        }
        out.scale(C64::new(0.5, 0.0))
    }

    /// Checks the coefficient symmetry `c_{β,α} = conj(c_{α,β})`, which is
    /// equivalent to `p(w) ∈ ℝ` for all `w`.
    pub fn is_conjugate_flattening(&self) -> bool {
        self.terms.iter().all(|(key, c)| {
            let mirror = self.coefficient(&key.conjugate());
            (mirror - c.conj()).norm() <= CF_TOL
        })
    }

    /// Evaluates at a point: `Σ c · w^α · conj(w)^β`.
    pub fn evaluate(&self, w: &[C64]) -> Result<C64, CpolyError> {
        if w.len() != self.dim {
            return Err(CpolyError::DimensionMismatch {
                expected: self.dim,
                got: w.len(),
            });
        }
        let conj: Vec<C64> = w.iter().map(|z| z.conj()).collect();
        let mut acc = C64::new(0.0, 0.0);
        for (key, c) in &self.terms {
            let mut m = *c;
            for (j, &e) in key.alpha.iter().enumerate() {
                for _ in 0..e {
                    m *= w[j];
                }
            }
            for (j, &e) in key.beta.iter().enumerate() {
                for _ in 0..e {
                    m *= conj[j];
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Substitutes `z ← U·z` (and `z̄ ← conj(U)·z̄`), so that
    /// `result(w) = p(U·w)` for all `w`. Degree never increases.
    pub fn compose_linear(&self, u: &DMatrix<C64>) -> Result<Self, CpolyError> {
        if u.nrows() != self.dim || u.ncols() != self.dim {
            return Err(CpolyError::DimensionMismatch {
                expected: self.dim,
                got: u.nrows(),
            });
        }
        let n = self.dim;
        // Linear forms the variables map to.
        let z_forms: Vec<CPolynomial> = (0..n)
            .map(|i| {
                Self::from_terms(
                    n,
                    (0..n).map(|j| (MonomialKey::var(n, j), u[(i, j)])),
                )
            })
            .collect();
        let zb_forms: Vec<CPolynomial> = (0..n)
            .map(|i| {
                Self::from_terms(
                    n,
                    (0..n).map(|j| (MonomialKey::conj_var(n, j), u[(i, j)].conj())),
                )
            })
            .collect();

        let mut out = Self::zero(n);
        for (key, c) in &self.terms {
            let mono = compose_monomial(key, &z_forms, &zb_forms);
            for (k, v) in &mono.terms {
                out.add_term(k.clone(), v * c);
            }
        }
        Ok(out)
    }

    pub fn to_term_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(key, c)| TermRecord {
                alpha: key.alpha.clone(),
                beta: key.beta.clone(),
                coeff: [c.re, c.im],
            })
            .collect()
    }

    pub fn from_term_records(dim: usize, records: &[TermRecord]) -> Result<Self, CpolyError> {
        let mut p = Self::zero(dim);
        for r in records {
            if r.alpha.len() != dim || r.beta.len() != dim {
                return Err(CpolyError::DimensionMismatch {
                    expected: dim,
                    got: r.alpha.len(),
                });
            }
            let key = MonomialKey::new(r.alpha.clone(), r.beta.clone())?;
            p.add_term(key, C64::new(r.coeff[0], r.coeff[1]));
        }
        Ok(p)
    }

    fn check_dim(&self, other: &Self) -> Result<(), CpolyError> {
        if self.dim != other.dim {
            return Err(CpolyError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Expands a single monomial under the substitution given by per-variable
/// linear forms, memoizing nothing: degrees and dimensions stay small here.
fn compose_monomial(
    key: &MonomialKey,
    z_forms: &[CPolynomial],
    zb_forms: &[CPolynomial],
) -> CPolynomial {
    let n = z_forms.len();
    let mut acc = CPolynomial::constant(n, C64::new(1.0, 0.0));
    for (i, &e) in key.alpha.iter().enumerate() {
        for _ in 0..e {
            acc = acc.mul(&z_forms[i]).expect("dims match");
        }
    }
    for (i, &e) in key.beta.iter().enumerate() {
        for _ in 0..e {
            acc = acc.mul(&zb_forms[i]).expect("dims match");
        }
    }
    acc
}

// Canonical printing in graded lexicographic order; golden tests rely on it.
impl fmt::Display for CPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, c) in &self.terms {
            let body = if key.degree() == 0 {
                format_coeff(c)
            } else if (c - C64::new(1.0, 0.0)).norm() < 1e-15 {
                format!("{key}")
            } else {
                format!("{}*{key}", format_coeff(c))
            };
            if first {
                write!(f, "{body}")?;
                first = false;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

fn format_coeff(c: &C64) -> String {
    if c.im.abs() < 1e-15 {
        format!("{}", c.re)
    } else if c.re.abs() < 1e-15 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// The barrier polynomial printed for the repeated-Z case study:
    /// 4.453 − 0.848 z0² − 3.871 z0 z̄0 + 2.274 z1 z̄1 − 0.848 z̄0².
    pub(crate) fn z_gate_barrier() -> CPolynomial {
        CPolynomial::from_terms(
            2,
            vec![
                (MonomialKey::one(2), c(4.453, 0.0)),
                (MonomialKey::new(vec![2, 0], vec![0, 0]).unwrap(), c(-0.848, 0.0)),
                (MonomialKey::new(vec![1, 0], vec![1, 0]).unwrap(), c(-3.871, 0.0)),
                (MonomialKey::new(vec![0, 1], vec![0, 1]).unwrap(), c(2.274, 0.0)),
                (MonomialKey::new(vec![0, 0], vec![2, 0]).unwrap(), c(-0.848, 0.0)),
            ],
        )
    }

    fn random_poly(rng: &mut ChaCha8Rng, dim: usize, max_degree: u32) -> CPolynomial {
        let num_terms = rng.gen_range(1..=8);
        let mut p = CPolynomial::zero(dim);
        for _ in 0..num_terms {
            let mut alpha = vec![0u32; dim];
            let mut beta = vec![0u32; dim];
            let deg = rng.gen_range(0..=max_degree);
            for _ in 0..deg {
                let slot = rng.gen_range(0..2 * dim);
                if slot < dim {
                    alpha[slot] += 1;
                } else {
                    beta[slot - dim] += 1;
                }
            }
            let coeff = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            p.add_term(MonomialKey::new(alpha, beta).unwrap(), coeff);
        }
        p
    }

    fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
        (0..dim)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn random_cf_poly(rng: &mut ChaCha8Rng, dim: usize, max_degree: u32) -> CPolynomial {
        random_poly(rng, dim, max_degree).symmetrize()
    }

    #[test]
    fn conjugate_of_plain_variable() {
        let p = CPolynomial::var(1, 0);
        assert_eq!(p.conjugate(), CPolynomial::conj_var(1, 0));
    }

    #[test]
    fn conjugate_swaps_indices_and_conjugates_coefficient() {
        // i·z0·z̄1 → −i·z1·z̄0
        let key = MonomialKey::new(vec![1, 0], vec![0, 1]).unwrap();
        let p = CPolynomial::monomial(2, key, c(0.0, 1.0));
        let expected = CPolynomial::monomial(
            2,
            MonomialKey::new(vec![0, 1], vec![1, 0]).unwrap(),
            c(0.0, -1.0),
        );
        assert_eq!(p.conjugate(), expected);
    }

    #[test]
    fn z_gate_barrier_is_self_conjugate() {
        let b = z_gate_barrier();
        assert_eq!(b.conjugate(), b);
        assert!(b.is_conjugate_flattening());
    }

    #[test]
    fn conjugate_flattening_examples() {
        assert!(CPolynomial::modulus_squared(1, 0).is_conjugate_flattening());

        let z0_sq = CPolynomial::monomial(
            1,
            MonomialKey::new(vec![2], vec![0]).unwrap(),
            c(1.0, 0.0),
        );
        assert!(!z0_sq.is_conjugate_flattening());
        // Witness of non-realness at z0 = 1 + i: (1+i)² = 2i.
        let v = z0_sq.evaluate(&[c(1.0, 1.0)]).unwrap();
        assert!(v.im.abs() > 1e-6);
    }

    #[test]
    fn evaluate_z_gate_barrier_at_basis_points() {
        let b = z_gate_barrier();
        let at_e0 = b.evaluate(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(at_e0.re, -1.114, epsilon = 1e-12);
        assert_abs_diff_eq!(at_e0.im, 0.0, epsilon = 1e-12);

        let at_e1 = b.evaluate(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(at_e1.re, 6.727, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_modulus_at_i() {
        let p = CPolynomial::modulus_squared(2, 0);
        let v = p.evaluate(&[c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let p = CPolynomial::var(2, 0);
        assert!(matches!(
            p.evaluate(&[c(1.0, 0.0)]),
            Err(CpolyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compose_with_z_gate_fixes_invariant_monomial() {
        let z = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let p = CPolynomial::modulus_squared(2, 1);
        assert_eq!(p.compose_linear(&z).unwrap(), p);
    }

    #[test]
    fn compose_with_x_gate_swaps_variables() {
        let x = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let p = CPolynomial::var(2, 0);
        assert_eq!(p.compose_linear(&x).unwrap(), CPolynomial::var(2, 1));
    }

    #[test]
    fn compose_modulus_with_hadamard() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        let p = CPolynomial::modulus_squared(2, 0);
        // ((z0+z1)/√2)·((z̄0+z̄1)/√2) = ½(z0z̄0 + z0z̄1 + z1z̄0 + z1z̄1)
        let got = p.compose_linear(&h).unwrap();
        let mut expected = CPolynomial::zero(2);
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let mut key = MonomialKey::one(2);
            key.alpha[a] += 1;
            key.beta[b] += 1;
            expected.add_term(key, c(0.5, 0.0));
        }
        for (key, v) in expected.terms() {
            assert_abs_diff_eq!((got.coefficient(key) - v).norm(), 0.0, epsilon = 1e-12);
        }
        assert_eq!(got.num_terms(), 4);
    }

    #[test]
    fn add_cancels_to_canonical_zero() {
        let p = CPolynomial::var(1, 0);
        let sum = p.add(&p.neg()).unwrap();
        assert!(sum.is_zero());
        assert_eq!(sum.num_terms(), 0);
        assert_eq!(sum.degree(), 0);
    }

    #[test]
    fn difference_of_squares() {
        let z0 = CPolynomial::var(1, 0);
        let zb0 = CPolynomial::conj_var(1, 0);
        let got = z0.add(&zb0).unwrap().mul(&z0.sub(&zb0).unwrap()).unwrap();
        let expected = CPolynomial::from_terms(
            1,
            vec![
                (MonomialKey::new(vec![2], vec![0]).unwrap(), c(1.0, 0.0)),
                (MonomialKey::new(vec![0], vec![2]).unwrap(), c(-1.0, 0.0)),
            ],
        );
        assert_eq!(got, expected);
    }

    #[test]
    fn product_of_conjugate_flattening_is_conjugate_flattening() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let p = random_cf_poly(&mut rng, 2, 2);
            let q = random_cf_poly(&mut rng, 2, 2);
            let prod = p.mul(&q).unwrap();
            assert!(prod.is_conjugate_flattening());
            for _ in 0..100 {
                let w = random_point(&mut rng, 2);
                let v = prod.evaluate(&w).unwrap();
                assert!(v.im.abs() <= 1e-9, "imaginary residue {}", v.im);
            }
        }
    }

    #[test]
    fn conjugate_commutes_with_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p = random_poly(&mut rng, 2, 3);
            let w = random_point(&mut rng, 2);
            let lhs = p.conjugate().evaluate(&w).unwrap();
            let rhs = p.evaluate(&w).unwrap().conj();
            assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn conjugate_flattening_implies_real_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let p = random_cf_poly(&mut rng, 2, 3);
            assert!(p.is_conjugate_flattening());
            for _ in 0..20 {
                let w = random_point(&mut rng, 2);
                assert!(p.evaluate(&w).unwrap().im.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn non_flattening_has_imaginary_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut found = 0;
        for _ in 0..50 {
            let p = random_poly(&mut rng, 2, 3);
            if p.is_conjugate_flattening() || p.is_zero() {
                continue;
            }
            let witness = (0..1000).any(|_| {
                let w = random_point(&mut rng, 2);
                p.evaluate(&w).unwrap().im.abs() > 1e-6
            });
            assert!(witness, "no imaginary witness for {p}");
            found += 1;
        }
        assert!(found > 10, "random generator produced too few non-cf polynomials");
    }

    #[test]
    fn composition_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..30 {
            let p = random_poly(&mut rng, 2, 2);
            let u = DMatrix::from_fn(2, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let v = DMatrix::from_fn(2, 2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let lhs = p.compose_linear(&u).unwrap().compose_linear(&v).unwrap();
            let rhs = p.compose_linear(&(&u * &v)).unwrap();
            for key in lhs.support().chain(rhs.support()) {
                assert!(
                    (lhs.coefficient(key) - rhs.coefficient(key)).norm() <= 1e-10,
                    "termwise mismatch at {key}"
                );
            }
        }
    }

    #[test]
    fn ring_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let p = random_poly(&mut rng, 2, 2);
            let q = random_poly(&mut rng, 2, 2);
            let r = random_poly(&mut rng, 2, 2);
            let assoc_l = p.mul(&q).unwrap().mul(&r).unwrap();
            let assoc_r = p.mul(&q.mul(&r).unwrap()).unwrap();
            let dist_l = p.mul(&q.add(&r).unwrap()).unwrap();
            let dist_r = p.mul(&q).unwrap().add(&p.mul(&r).unwrap()).unwrap();
            for (a, b) in [(&assoc_l, &assoc_r), (&dist_l, &dist_r)] {
                for key in a.support().chain(b.support()) {
                    assert!((a.coefficient(key) - b.coefficient(key)).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn term_records_round_trip() {
        let b = z_gate_barrier();
        let records = b.to_term_records();
        let back = CPolynomial::from_term_records(2, &records).unwrap();
        assert_eq!(b, back);
    }

    #[test]
    fn display_is_deterministic_graded_lex() {
        let b = z_gate_barrier();
        assert_eq!(
            format!("{b}"),
            "4.453 + -0.848*z0^2 + -3.871*z0*zb0 + 2.274*z1*zb1 + -0.848*zb0^2"
        );
    }
}
