//! Coefficient matching and the HSOS membership query.

use thiserror::Error;

use super::backend::{solve, SolveOutcome, SolverBackend};
use super::basis::MonomialBasis;
use super::conic::ConicProblem;
use super::gram::{gram_to_poly, GramError, HermitianGram, SymbolicGram};
use super::realgram::RealGram;
use super::sympoly::SymPoly;
use crate::cpoly::CPolynomial;

/// How PSD Gram constraints are realized as real blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GramForm {
    /// Hermitian Grams with the 2m x 2m real embedding.
    #[default]
    Realified,
    /// Real symmetric Grams over the real-combination basis (same
    /// polynomial cone, quarter of the PSD block area).
    RealCombination,
}

/// A slack Gram in either form.
#[derive(Debug)]
pub enum SlackGram {
    Hermitian(SymbolicGram),
    Real(RealGram),
}

impl SlackGram {
    /// Reconstructs the represented polynomial under an assignment.
    pub fn evaluate_poly(
        &self,
        basis: &MonomialBasis,
        x: &[f64],
    ) -> Result<CPolynomial, GramError> {
        match self {
            SlackGram::Hermitian(g) => gram_to_poly(&g.evaluate(x), basis),
            SlackGram::Real(g) => Ok(g.evaluate_poly(x)),
        }
    }
}

#[derive(Debug, Error)]
pub enum HsosError {
    #[error("polynomial is not conjugate-flattening")]
    NotConjugateFlattening,
    #[error("{label}: expression degree {expr_degree} exceeds 2x slack basis degree {slack_degree}")]
    ExpressionDegree {
        label: String,
        expr_degree: u32,
        slack_degree: u32,
    },
    #[error("backend failed: {0}")]
    Backend(String),
    #[error(transparent)]
    Gram(#[from] GramError),
    #[error("recovered Gram mismatches target coefficients by {0:.3e}")]
    ReconstructionMismatch(f64),
}

/// Demands `expr = v† Q v` for a fresh PSD slack Gram over `slack_basis`:
/// adds the realified PSD block plus one complex equality (two real rows)
/// per monomial in the union of supports. Conjugate-mirror monomials carry
/// redundant conjugated equations and are emitted only once.
pub fn match_coefficients(
    expr: &SymPoly,
    slack_basis: &MonomialBasis,
    problem: &mut ConicProblem,
    label: &str,
) -> Result<SymbolicGram, HsosError> {
    match match_coefficients_with(expr, slack_basis, problem, label, GramForm::Realified)? {
        SlackGram::Hermitian(g) => Ok(g),
        SlackGram::Real(_) => unreachable!("realified form requested"),
    }
}

/// [`match_coefficients`] with a choice of Gram realization.
pub fn match_coefficients_with(
    expr: &SymPoly,
    slack_basis: &MonomialBasis,
    problem: &mut ConicProblem,
    label: &str,
    form: GramForm,
) -> Result<SlackGram, HsosError> {
    if expr.degree() > 2 * slack_basis.max_degree() {
        return Err(HsosError::ExpressionDegree {
            label: label.to_string(),
            expr_degree: expr.degree(),
            slack_degree: slack_basis.max_degree(),
        });
    }
    let (slack, gram_poly) = match form {
        GramForm::Realified => {
            let g = SymbolicGram::new(slack_basis.len(), &format!("{label}.slack"), |name| {
                problem.new_var(name)
            });
            problem
                .add_psd_block(g.realify(format!("{label}.slack")))
                .expect("triangle entry count is consistent by construction");
            let poly = g.to_sympoly(slack_basis);
            (SlackGram::Hermitian(g), poly)
        }
        GramForm::RealCombination => {
            let g = RealGram::new(slack_basis, &format!("{label}.slack"), |name| {
                problem.new_var(name)
            });
            problem
                .add_psd_block(g.psd_block(format!("{label}.slack")))
                .expect("triangle entry count is consistent by construction");
            let poly = g.to_sympoly();
            (SlackGram::Real(g), poly)
        }
    };

    let mut diff = expr.clone();
    diff.sub_assign(&gram_poly);

    for (key, e) in diff.terms() {
        let mirror = key.conjugate();
        if *key > mirror {
            // The mirrored equation is the complex conjugate of this one.
            continue;
        }
        problem.add_equality(&e.real_part(), format!("{label}[{key}].re"));
        if *key != mirror {
            problem.add_equality(&e.imag_part(), format!("{label}[{key}].im"));
        }
    }
    Ok(slack)
}



/// Outcome of the HSOS membership query at a fixed basis degree.
#[derive(Debug)]
pub enum HsosCheckOutcome {
    /// A PSD Gram realizing the polynomial.
    Hsos(HermitianGram),
    /// No PSD Gram exists at this basis degree (backend-certified).
    Infeasible,
}

/// Decides whether `p` admits an HSOS representation with basis degree `d`,
/// by semidefinite feasibility. Inputs must be conjugate-flattening with
/// `deg(p) ≤ 2d`.
pub fn hsos_check(
    p: &CPolynomial,
    d: u32,
    backend: &dyn SolverBackend,
) -> Result<HsosCheckOutcome, HsosError> {
    if !p.is_conjugate_flattening() {
        return Err(HsosError::NotConjugateFlattening);
    }
    let basis = MonomialBasis::new(p.dimension(), d);
    let mut problem = ConicProblem::new();
    let expr = SymPoly::from_numeric(p);
    let slack = match_coefficients(&expr, &basis, &mut problem, "hsos_check")?;

    match solve(&problem, backend) {
        SolveOutcome::Feasible(x) => {
            let gram = slack.evaluate(&x);
            let recon = gram_to_poly(&gram, &basis)?;
            let err = recon
                .support()
                .chain(p.support())
                .map(|key| (recon.coefficient(key) - p.coefficient(key)).norm())
                .fold(0.0, f64::max);
            if err > 1e-7 {
                return Err(HsosError::ReconstructionMismatch(err));
            }
            Ok(HsosCheckOutcome::Hsos(gram))
        }
        SolveOutcome::Infeasible => Ok(HsosCheckOutcome::Infeasible),
        SolveOutcome::SolverError(msg) => Err(HsosError::Backend(msg)),
    }
}
