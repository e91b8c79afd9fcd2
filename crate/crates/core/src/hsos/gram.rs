//! Hermitian Gram matrices: the bridge between HSOS polynomials and PSD
//! constraints.
//!
//! `p(z) = v(z)† Q v(z)` over a monomial basis `v`. `p` is a Hermitian sum
//! of squares exactly when some Hermitian PSD `Q` works; both directions are
//! implemented here ([`gram_to_poly`] forward, [`extract_decomposition`] via
//! eigenfactorization, and the feasibility query lives in
//! [`super::ops::hsos_check`]).

use nalgebra::DMatrix;
use thiserror::Error;

use super::basis::MonomialBasis;
use super::conic::{LinExpr, PsdBlock, RealAffine, VarId};
use crate::cpoly::CPolynomial;
use crate::C64;

/// Eigenvalues above this are accepted as numerically PSD.
pub const PSD_ACCEPT_TOL: f64 = -1e-8;
/// Eigenvalues below this reject the matrix outright.
pub const PSD_REJECT_TOL: f64 = -1e-6;

#[derive(Debug, Error)]
pub enum GramError {
    #[error("Gram matrix is {rows}x{cols} but the basis has {basis} monomials")]
    IndexMismatch {
        rows: usize,
        cols: usize,
        basis: usize,
    },
    #[error("matrix is not Hermitian: max asymmetry {0:.3e}")]
    NotHermitian(f64),
    #[error("matrix is not PSD: minimum eigenvalue {0:.3e}")]
    NotPsd(f64),
}

/// Numeric Hermitian Gram matrix indexed by a monomial basis.
#[derive(Debug, Clone)]
pub struct HermitianGram {
    matrix: DMatrix<C64>,
}

impl HermitianGram {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self, GramError> {
        let asym = (0..matrix.nrows())
            .flat_map(|j| (0..matrix.ncols()).map(move |k| (j, k)))
            .map(|(j, k)| (matrix[(j, k)] - matrix[(k, j)].conj()).norm())
            .fold(0.0, f64::max);
        if asym > 1e-9 {
            return Err(GramError::NotHermitian(asym));
        }
        Ok(Self { matrix })
    }

    pub fn identity(size: usize) -> Self {
        Self {
            matrix: DMatrix::identity(size, size),
        }
    }

    pub fn zeros(size: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(size, size),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= PSD_ACCEPT_TOL
    }
}

/// Expands `v(z)† Q v(z)` into a polynomial. Hermitian input yields a
/// conjugate-flattening result; PSD input yields an HSOS (hence a polynomial
/// that is nonnegative everywhere).
pub fn gram_to_poly(q: &HermitianGram, basis: &MonomialBasis) -> Result<CPolynomial, GramError> {
    let m = q.size();
    if m != basis.len() {
        return Err(GramError::IndexMismatch {
            rows: m,
            cols: q.matrix.ncols(),
            basis: basis.len(),
        });
    }
    let mut p = CPolynomial::zero(basis.dimension());
    for j in 0..m {
        for k in 0..m {
            let c = q.matrix[(j, k)];
            if c.norm() == 0.0 {
                continue;
            }
            // conj(v_j)·v_k = z^{β_j + α_k} z̄^{α_j + β_k}
            let key = basis.key(j).conjugate().mul(basis.key(k));
            p.add_term(key, c);
        }
    }
    Ok(p)
}

/// Factorizes a PSD Gram as `Q = Σ λ_i u_i u_i†` and returns the polynomials
/// `p_i = √λ_i · (u_i† v)`, so that `Σ p_i · conj(p_i)` reconstructs
/// `gram_to_poly(Q)`. Eigenvalues in `[PSD_REJECT_TOL, 0)` are clipped to
/// zero; anything lower is an error.
pub fn extract_decomposition(
    q: &HermitianGram,
    basis: &MonomialBasis,
) -> Result<Vec<CPolynomial>, GramError> {
    if q.size() != basis.len() {
        return Err(GramError::IndexMismatch {
            rows: q.size(),
            cols: q.size(),
            basis: basis.len(),
        });
    }
    let eig = q.matrix.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < PSD_REJECT_TOL {
        return Err(GramError::NotPsd(min_eig));
    }
    let mut out = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 1e-12 {
            continue;
        }
        let scale = C64::new(lambda.sqrt(), 0.0);
        let mut p = CPolynomial::zero(basis.dimension());
        for k in 0..basis.len() {
            // (u_i† v)_k coefficient is conj(u_i[k]).
            let coeff = eig.eigenvectors[(k, i)].conj() * scale;
            p.add_term(basis.key(k).clone(), coeff);
        }
        if !p.is_zero() {
            out.push(p);
        }
    }
    Ok(out)
}

/// Real symmetric embedding `[[Re Q, −Im Q], [Im Q, Re Q]]` of a numeric
/// Hermitian matrix. PSD is preserved in both directions and every
/// eigenvalue of `Q` appears twice.
pub fn realify_numeric(q: &DMatrix<C64>) -> DMatrix<f64> {
    let m = q.nrows();
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        for k in 0..m {
            let v = q[(j, k)];
            out[(j, k)] = v.re;
            out[(j + m, k + m)] = v.re;
            out[(j, k + m)] = -v.im;
            out[(j + m, k)] = v.im;
        }
    }
    out
}

/// Symbolic Hermitian Gram: one real decision variable per diagonal entry,
/// a (re, im) pair per strict upper-triangle entry. Hermitian symmetry is
/// structural, never a constraint.
#[derive(Debug, Clone)]
pub struct SymbolicGram {
    size: usize,
    /// Upper triangle, column-major; entry (j,k) with j ≤ k.
    entries: Vec<LinExpr>,
}

impl SymbolicGram {
    /// Allocates fresh decision variables in `problem`-like fashion through
    /// the supplied allocator.
    pub fn new(
        size: usize,
        label: &str,
        mut alloc: impl FnMut(String) -> VarId,
    ) -> Self {
        let mut entries = Vec::with_capacity(size * (size + 1) / 2);
        for col in 0..size {
            for row in 0..=col {
                if row == col {
                    let v = alloc(format!("{label}[{row},{col}].re"));
                    entries.push(LinExpr::scaled_var(v, C64::new(1.0, 0.0)));
                } else {
                    let re = alloc(format!("{label}[{row},{col}].re"));
                    let im = alloc(format!("{label}[{row},{col}].im"));
                    let mut e = LinExpr::scaled_var(re, C64::new(1.0, 0.0));
                    e.add_term(im, C64::new(0.0, 1.0));
                    entries.push(e);
                }
            }
        }
        Self { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry (j, k) for any j, k, using Hermitian symmetry below the
    /// diagonal.
    pub fn entry(&self, j: usize, k: usize) -> LinExpr {
        if j <= k {
            self.entries[k * (k + 1) / 2 + j].clone()
        } else {
            self.entries[j * (j + 1) / 2 + k].conjugated()
        }
    }

    /// Expands `v† Q v` with symbolic coefficients.
    pub fn to_sympoly(&self, basis: &MonomialBasis) -> super::sympoly::SymPoly {
        assert_eq!(self.size, basis.len(), "Gram/basis size mismatch");
        let mut p = super::sympoly::SymPoly::zero(basis.dimension());
        for j in 0..self.size {
            for k in 0..self.size {
                let key = basis.key(j).conjugate().mul(basis.key(k));
                p.add_linexpr(key, &self.entry(j, k));
            }
        }
        p
    }

    /// Realified PSD block `[[Re Q, −Im Q], [Im Q, Re Q]]` over the same
    /// decision variables.
    pub fn realify(&self, label: impl Into<String>) -> PsdBlock {
        let m = self.size;
        let dim = 2 * m;
        let mut entries = vec![RealAffine::zero(); PsdBlock::triangle_len(dim)];
        for col in 0..dim {
            for row in 0..=col {
                let (j, k, part) = match (row < m, col < m) {
                    (true, true) => (row, col, Part::Re),
                    (false, false) => (row - m, col - m, Part::Re),
                    (true, false) => (row, col - m, Part::NegIm),
                    (false, true) => unreachable!("row ≤ col in triangle"),
                };
                let e = self.entry(j, k);
                let affine = match part {
                    Part::Re => e.real_part(),
                    Part::NegIm => e.imag_part().scaled(-1.0),
                };
                entries[PsdBlock::triangle_index(row, col)] = affine;
            }
        }
        PsdBlock {
            dim,
            entries,
            label: label.into(),
        }
    }

    /// Reads the numeric Gram back from an assignment.
    pub fn evaluate(&self, x: &[f64]) -> HermitianGram {
        let mut m = DMatrix::zeros(self.size, self.size);
        for j in 0..self.size {
            for k in 0..self.size {
                m[(j, k)] = self.entry(j, k).evaluate(x);
            }
        }
        HermitianGram::new(m).expect("structurally Hermitian")
    }
}

enum Part {
    Re,
    NegIm,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::MonomialKey;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_gram_over_degree_one_basis() {
        let basis = MonomialBasis::new(1, 1);
        let q = HermitianGram::identity(3);
        let p = gram_to_poly(&q, &basis).unwrap();
        // conj(1)·1 + conj(z0)·z0 + conj(z̄0)·z̄0 = 1 + 2·z0z̄0
        let mut expected = CPolynomial::real_constant(1, 1.0);
        expected.add_term(MonomialKey::new(vec![1], vec![1]).unwrap(), c(2.0, 0.0));
        assert_eq!(p, expected);

        // Oracle: evaluate both sides at random points.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let w = [c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))];
            let direct = 1.0 + 2.0 * (w[0].norm_sqr());
            assert_abs_diff_eq!(p.evaluate(&w).unwrap().re, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn off_diagonal_pair_gives_pure_powers() {
        let basis = MonomialBasis::new(1, 1);
        // Q(z̄0, z0) = Q(z0, z̄0) = 1: conjugate-closed bases generate z0², z̄0².
        let mut m = DMatrix::zeros(3, 3);
        m[(2, 1)] = c(1.0, 0.0);
        m[(1, 2)] = c(1.0, 0.0);
        let q = HermitianGram::new(m).unwrap();
        let p = gram_to_poly(&q, &basis).unwrap();
        let expected = CPolynomial::from_terms(
            1,
            vec![
                (MonomialKey::new(vec![2], vec![0]).unwrap(), c(1.0, 0.0)),
                (MonomialKey::new(vec![0], vec![2]).unwrap(), c(1.0, 0.0)),
            ],
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn zero_gram_gives_zero_polynomial() {
        let basis = MonomialBasis::new(1, 1);
        let p = gram_to_poly(&HermitianGram::zeros(3), &basis).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn gram_size_mismatch_is_rejected() {
        let basis = MonomialBasis::new(1, 1);
        let q = HermitianGram::identity(2);
        assert!(matches!(
            gram_to_poly(&q, &basis),
            Err(GramError::IndexMismatch { .. })
        ));
    }

    #[test]
    fn extraction_reconstructs_identity() {
        let basis = MonomialBasis::new(1, 1);
        let q = HermitianGram::identity(3);
        let parts = extract_decomposition(&q, &basis).unwrap();
        assert_eq!(parts.len(), 3);
        let mut recon = CPolynomial::zero(1);
        for p in &parts {
            recon = recon.add(&p.mul(&p.conjugate()).unwrap()).unwrap();
        }
        let direct = gram_to_poly(&q, &basis).unwrap();
        for key in direct.support().chain(recon.support()) {
            assert!((recon.coefficient(key) - direct.coefficient(key)).norm() < 1e-10);
        }
    }

    #[test]
    fn rank_one_outer_product_extracts_single_polynomial() {
        let basis = MonomialBasis::new(1, 1);
        // Q = vv† with v = (1, 1, 0) → p = 1 + z0 (up to phase).
        let v = nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let q = HermitianGram::new(&v * v.adjoint()).unwrap();
        let parts = extract_decomposition(&q, &basis).unwrap();
        assert_eq!(parts.len(), 1);
        // p·conj(p) = 1 + z0 + z̄0 + z0z̄0, expanded by hand.
        let prod = parts[0].mul(&parts[0].conjugate()).unwrap();
        let expected = CPolynomial::from_terms(
            1,
            vec![
                (MonomialKey::one(1), c(1.0, 0.0)),
                (MonomialKey::var(1, 0), c(1.0, 0.0)),
                (MonomialKey::conj_var(1, 0), c(1.0, 0.0)),
                (MonomialKey::new(vec![1], vec![1]).unwrap(), c(1.0, 0.0)),
            ],
        );
        for key in expected.support().chain(prod.support()) {
            assert!((prod.coefficient(key) - expected.coefficient(key)).norm() < 1e-10);
        }
    }

    #[test]
    fn extraction_of_zero_gram_is_empty() {
        let basis = MonomialBasis::new(1, 1);
        assert!(extract_decomposition(&HermitianGram::zeros(3), &basis)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn extraction_rejects_indefinite_gram() {
        let basis = MonomialBasis::new(1, 1);
        let mut m = DMatrix::identity(3, 3);
        m[(0, 0)] = c(-1.0, 0.0);
        let q = HermitianGram::new(m).unwrap();
        assert!(matches!(
            extract_decomposition(&q, &basis),
            Err(GramError::NotPsd(_))
        ));
    }

    #[test]
    fn realify_scalar_and_identity() {
        let q = DMatrix::from_row_slice(1, 1, &[c(0.7, 0.0)]);
        let r = realify_numeric(&q);
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[0.7, 0.0, 0.0, 0.7]));

        let id = DMatrix::<C64>::identity(2, 2);
        assert_eq!(realify_numeric(&id), DMatrix::<f64>::identity(4, 4));
    }

    #[test]
    fn realify_doubles_eigenvalues() {
        // [[0, -i], [i, 0]] has eigenvalues ±1 → embedding has {1, 1, -1, -1}.
        let q = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let r = realify_numeric(&q);
        let mut eigs: Vec<f64> = r.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-1.0, -1.0, 1.0, 1.0];
        for (got, want) in eigs.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn realify_preserves_psd_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen_psd = 0;
        let mut seen_indefinite = 0;
        for _ in 0..100 {
            let size = rng.gen_range(1..=4);
            let a = DMatrix::from_fn(size, size, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            // Mix PSD (a†a) and general Hermitian ((a + a†)/2) instances.
            let q = if rng.gen_bool(0.5) {
                a.adjoint() * &a
            } else {
                (&a + a.adjoint()).scale(0.5)
            };
            let herm = HermitianGram::new(q.clone()).unwrap();
            let complex_psd = herm.min_eigenvalue() >= -1e-10;
            let real_min = realify_numeric(&q)
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            assert_eq!(complex_psd, real_min >= -1e-10);
            if complex_psd {
                seen_psd += 1;
            } else {
                seen_indefinite += 1;
            }
        }
        assert!(seen_psd > 10 && seen_indefinite > 10);
    }

    #[test]
    fn symbolic_gram_is_structurally_hermitian() {
        let mut next = 0usize;
        let gram = SymbolicGram::new(3, "Q", |_| {
            let v = VarId(next);
            next += 1;
            v
        });
        // 3 diagonal vars + 3 off-diagonal pairs = 9 variables.
        assert_eq!(next, 9);
        let x: Vec<f64> = (0..9).map(|i| (i as f64) * 0.1 - 0.3).collect();
        let q = gram.evaluate(&x);
        assert!(q.matrix().nrows() == 3);
        // Hermitian by construction: validated inside HermitianGram::new.
    }

    #[test]
    fn symbolic_realify_matches_numeric_realify() {
        let mut next = 0usize;
        let gram = SymbolicGram::new(2, "Q", |_| {
            let v = VarId(next);
            next += 1;
            v
        });
        let x = vec![1.0, 0.25, -0.5, 2.0];
        let block = gram.realify("Q");
        let real_block = block.evaluate(&x);
        let numeric = realify_numeric(gram.evaluate(&x).matrix());
        assert_abs_diff_eq!((real_block - numeric).norm(), 0.0, epsilon = 1e-14);
    }
}
