//! Compilation of the barrier conditions into a conic problem.
//!
//! Each instantiated condition becomes one expression that must be a
//! Hermitian sum of squares:
//!
//! ```text
//! init:     −B_φ0          − λᵀ g_init  − μᵀ h_init
//! unsafe:    B_φ  − d      − λᵀ g_unsafe − μᵀ h_unsafe
//! step:     −B_φ∘U  + B_φ  + ε − λᵀ g_state − μᵀ h_state
//! pair:     −B_to   + B_from + γ − λᵀ g_state − μᵀ h_state
//! induct:   −B_end∘W + B_start   − λᵀ g_state − μᵀ h_state
//! ```
//!
//! with fresh HSOS multipliers `λ` for inequalities, free
//! conjugate-flattening multipliers `μ` for equalities, and a fresh PSD
//! slack Gram per expression via coefficient matching. Barrier coefficients
//! enter affinely with conjugate symmetry built in.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::hyper::{DChoice, Hyperparams, ObjectiveMode};
use super::plan::{phase_plan, PhasePlan, PlanInstance};
use crate::cpoly::{CPolynomial, MonomialKey};
use crate::hsos::basis::MonomialBasis;
use crate::hsos::conic::{ConicProblem, LinExpr, PsdBlock, RealAffine, VarId};
use crate::hsos::gram::SymbolicGram;
use crate::hsos::ops::{match_coefficients_with, GramForm, HsosError, SlackGram};
use crate::hsos::realgram::RealGram;
use crate::hsos::sympoly::SymPoly;
use crate::qsystem::{PhaseId, QSystem, Region};
use crate::C64;

/// Strict-inequality margin used when `d` or `ε + γ` become decision
/// variables.
const STRICT_MARGIN: f64 = 1e-6;

/// One coefficient-matched expression, kept for post-solve residual checks.
#[derive(Debug)]
pub struct MatchedExpression {
    pub label: String,
    pub expr: SymPoly,
    pub slack: SlackGram,
    pub basis: MonomialBasis,
}

/// Everything the synthesizer needs after compilation.
#[derive(Debug)]
pub struct BuildArtifacts {
    pub problem: ConicProblem,
    pub plan: PhasePlan,
    pub barriers: BTreeMap<PhaseId, SymPoly>,
    pub matched: Vec<MatchedExpression>,
    pub inventory: Vec<String>,
    pub warnings: Vec<String>,
    pub epsilon_var: Option<VarId>,
    pub gamma_var: Option<VarId>,
    pub d_var: Option<VarId>,
}

/// Rounds up to the next even integer.
fn even_up(v: u32) -> u32 {
    v + (v % 2)
}

/// Default multiplier degree: smallest even value covering the barrier-side
/// degree over the region polynomial.
fn default_multiplier_degree(barrier_degree: u32, region_poly_degree: u32) -> u32 {
    even_up(barrier_degree.saturating_sub(region_poly_degree))
}

struct InstanceBuilder<'a> {
    problem: &'a mut ConicProblem,
    label: String,
    expr: SymPoly,
    gram_form: GramForm,
}

impl<'a> InstanceBuilder<'a> {
    /// Subtracts `λᵀ g + μᵀ h` for the region, allocating one HSOS
    /// multiplier per inequality and one free conjugate-flattening
    /// multiplier per equality.
    fn subtract_region_multipliers(
        &mut self,
        region: &Region,
        barrier_degree: u32,
        override_degree: Option<u32>,
    ) {
        let dim = region.dim();
        for (j, g) in region.inequalities().iter().enumerate() {
            let deg = override_degree
                .map(even_up)
                .unwrap_or_else(|| default_multiplier_degree(barrier_degree, g.degree()));
            let basis = MonomialBasis::new(dim, deg / 2);
            let label = format!("{}.lam{j}", self.label);
            let lambda = match self.gram_form {
                GramForm::Realified => {
                    let gram =
                        SymbolicGram::new(basis.len(), &label, |name| self.problem.new_var(name));
                    self.problem
                        .add_psd_block(gram.realify(&label))
                        .expect("triangle layout is consistent");
                    gram.to_sympoly(&basis)
                }
                GramForm::RealCombination => {
                    let gram = RealGram::new(&basis, &label, |name| self.problem.new_var(name));
                    self.problem
                        .add_psd_block(gram.psd_block(&label))
                        .expect("triangle layout is consistent");
                    gram.to_sympoly()
                }
            };
            self.expr.sub_assign(&lambda.mul_numeric(g));
        }
        for (j, h) in region.equalities().iter().enumerate() {
            let deg = override_degree
                .map(even_up)
                .unwrap_or_else(|| default_multiplier_degree(barrier_degree, h.degree()));
            let label = format!("{}.mu{j}", self.label);
            let mu = SymPoly::free_conjugate_flattening(dim, deg, &label, |name| {
                self.problem.new_var(name)
            });
            self.expr.sub_assign(&mu.mul_numeric(h));
        }
    }
}

/// Builds the full conic problem for a system and hyperparameters.
pub fn build_constraints(
    system: &QSystem,
    hyper: &Hyperparams,
) -> Result<BuildArtifacts, HsosError> {
    let dim = system.dim();
    let delta = hyper.barrier_degree;
    let plan = phase_plan(system.schedule(), hyper.k);
    let mut problem = ConicProblem::new();
    let mut warnings = Vec::new();
    let mut inventory = Vec::new();

    let mut barriers = BTreeMap::new();
    for &phase in &plan.phases {
        let poly = SymPoly::free_conjugate_flattening(dim, delta, &format!("B[{phase}]"), |name| {
            problem.new_var(name)
        });
        barriers.insert(phase, poly);
    }

    // Constants that may be decision variables depending on the objective.
    let mut epsilon_var = None;
    let mut gamma_var = None;
    let mut d_var = None;
    match hyper.objective {
        ObjectiveMode::Feasibility => {}
        ObjectiveMode::MinimizeSlack => {
            let e = problem.new_var("epsilon");
            let g = problem.new_var("gamma");
            for (v, name) in [(e, "epsilon"), (g, "gamma")] {
                problem
                    .add_psd_block(PsdBlock {
                        dim: 1,
                        entries: vec![RealAffine::var(v)],
                        label: format!("{name} >= 0"),
                    })
                    .expect("scalar block");
            }
            let d = hyper.fixed_d().expect("validated: MinimizeSlack keeps d fixed");
            let mut headroom = RealAffine::constant(d - STRICT_MARGIN);
            headroom.add_term(e, -(hyper.k as f64));
            headroom.add_term(g, -(hyper.k as f64));
            problem
                .add_psd_block(PsdBlock {
                    dim: 1,
                    entries: vec![headroom],
                    label: "d - k(epsilon+gamma) margin".into(),
                })
                .expect("scalar block");
            problem.objective = vec![(e, 1.0), (g, 1.0)];
            epsilon_var = Some(e);
            gamma_var = Some(g);
        }
    }
    if let DChoice::Maximize { margin, cap } = hyper.d {
        let d = problem.new_var("d");
        let bound = hyper.k as f64 * (hyper.epsilon + hyper.gamma);
        let mut above = RealAffine::constant(-bound - margin);
        above.add_term(d, 1.0);
        let mut below = RealAffine::constant(cap);
        below.add_term(d, -1.0);
        for (entries, label) in [(above, "d lower margin"), (below, "d cap")] {
            problem
                .add_psd_block(PsdBlock {
                    dim: 1,
                    entries: vec![entries],
                    label: label.into(),
                })
                .expect("scalar block");
        }
        problem.objective = vec![(d, -1.0)];
        d_var = Some(d);
    }

    let epsilon_term = |e: &mut SymPoly| match epsilon_var {
        Some(v) => e.add_linexpr(MonomialKey::one(dim), &LinExpr::scaled_var(v, C64::new(1.0, 0.0))),
        None => e.add_constant(MonomialKey::one(dim), C64::new(hyper.epsilon, 0.0)),
    };
    let gamma_term = |e: &mut SymPoly| match gamma_var {
        Some(v) => e.add_linexpr(MonomialKey::one(dim), &LinExpr::scaled_var(v, C64::new(1.0, 0.0))),
        None => e.add_constant(MonomialKey::one(dim), C64::new(hyper.gamma, 0.0)),
    };
    let d_term = |e: &mut SymPoly| match d_var {
        Some(v) => e.add_linexpr(MonomialKey::one(dim), &LinExpr::scaled_var(v, C64::new(-1.0, 0.0))),
        None => e.add_constant(
            MonomialKey::one(dim),
            C64::new(-hyper.fixed_d().expect("fixed d"), 0.0),
        ),
    };

    let unsafe_vacuous = system.unsafe_region().inequalities().is_empty();
    if unsafe_vacuous {
        warnings.push(
            "unsafe region has no inequality constraints; separation conditions are vacuous"
                .to_string(),
        );
    }
    let prune_step = hyper.prune_step_when_k1_gamma0
        && hyper.k == 1
        && hyper.gamma == 0.0
        && hyper.objective == ObjectiveMode::Feasibility;
    if prune_step {
        inventory.push("step instances pruned (k=1, gamma=0: implied by pair + induction)".into());
    }

    let mut matched = Vec::new();
    for instance in &plan.instances {
        let label = instance.to_string();
        let (expr, region, mult_override) = match instance {
            PlanInstance::Initial { phase } => {
                let mut e = barriers[phase].scaled(C64::new(-1.0, 0.0));
                e.add_constant(
                    MonomialKey::one(dim),
                    C64::new(-hyper.separation_margin, 0.0),
                );
                (e, system.initial(), hyper.multiplier_degrees.initial)
            }
            PlanInstance::Unsafe { phase } => {
                if unsafe_vacuous {
                    continue;
                }
                let mut e = barriers[phase].clone();
                d_term(&mut e);
                e.add_constant(
                    MonomialKey::one(dim),
                    C64::new(-hyper.separation_margin, 0.0),
                );
                (e, system.unsafe_region(), hyper.multiplier_degrees.unsafe_region)
            }
            PlanInstance::Step { phase, mode } => {
                if prune_step {
                    continue;
                }
                let u = system.mode(*mode).matrix();
                let mut e = compose_symbolic(&barriers[phase], u).scaled(C64::new(-1.0, 0.0));
                e.add_assign(&barriers[phase]);
                epsilon_term(&mut e);
                (e, system.state_space(), hyper.multiplier_degrees.step)
            }
            PlanInstance::Pair { from, to } => {
                let mut e = barriers[to].scaled(C64::new(-1.0, 0.0));
                e.add_assign(&barriers[from]);
                gamma_term(&mut e);
                (e, system.state_space(), hyper.multiplier_degrees.pair)
            }
            PlanInstance::Induction { start, end, word } => {
                let w = word_matrix(system, word);
                let mut e = compose_symbolic(&barriers[end], &w).scaled(C64::new(-1.0, 0.0));
                e.add_assign(&barriers[start]);
                (e, system.state_space(), hyper.multiplier_degrees.induction)
            }
        };

        // Expressions whose barrier part cancels symbolically (identity
        // words, self-pairs) reduce to a bare constant offset: nonnegative
        // offsets are trivially Hermitian sums of squares and need no slack
        // Gram. Matching them anyway would pin a Gram to the zero face of
        // the PSD cone and destroy the interior the solver relies on.
        if let Some(constant) = symbolically_constant(&expr) {
            if constant >= -1e-12 {
                inventory.push(format!(
                    "{label}: trivially satisfied (reduces to constant {constant:.3e} >= 0)"
                ));
                continue;
            } else {
                problem.add_equality(
                    &RealAffine::constant(constant),
                    format!("{label}: constant expression is negative"),
                );
                inventory.push(format!(
                    "{label}: reduces to negative constant {constant:.3e}; infeasible"
                ));
                continue;
            }
        }

        let mut builder = InstanceBuilder {
            problem: &mut problem,
            label: label.clone(),
            expr,
            gram_form: hyper.gram_form,
        };
        builder.subtract_region_multipliers(region, delta, mult_override);
        let expr = builder.expr;

        let slack_half = expr.degree().div_ceil(2).max(1);
        let slack_basis = MonomialBasis::new(dim, slack_half);
        let slack =
            match_coefficients_with(&expr, &slack_basis, &mut problem, &label, hyper.gram_form)?;
        inventory.push(format!(
            "{label}: slack basis degree {slack_half} ({} monomials)",
            slack_basis.len()
        ));
        matched.push(MatchedExpression {
            label,
            expr,
            slack,
            basis: slack_basis,
        });
    }

    Ok(BuildArtifacts {
        problem,
        plan,
        barriers,
        matched,
        inventory,
        warnings,
        epsilon_var,
        gamma_var,
        d_var,
    })
}

fn compose_symbolic(b: &SymPoly, u: &DMatrix<C64>) -> SymPoly {
    b.compose_linear(u)
}

/// `Some(c)` when the expression has no decision-variable dependence at all
/// and every non-constant monomial coefficient vanished.
fn symbolically_constant(expr: &SymPoly) -> Option<f64> {
    let mut constant = 0.0;
    for (key, e) in expr.terms() {
        if !e.terms.is_empty() {
            return None;
        }
        if key.degree() == 0 {
            constant = e.constant.re;
        } else if e.constant.norm() > 1e-14 {
            return None;
        }
    }
    Some(constant)
}

/// Matrix of `f_{word} = U_{w_{k-1}} ⋯ U_{w_0}` (first word entry applied
/// first).
fn word_matrix(system: &QSystem, word: &[usize]) -> DMatrix<C64> {
    let dim = system.dim();
    let mut acc = DMatrix::<C64>::identity(dim, dim);
    for &m in word {
        acc = system.mode(m).matrix() * acc;
    }
    acc
}

/// Numeric re-expansion of one matched expression under an assignment;
/// returns the maximum coefficient deviation from its slack Gram. This is
/// the soundness hand-off: certificates only ship when every instantiated
/// identity holds within tolerance.
pub fn expression_residual(m: &MatchedExpression, x: &[f64]) -> f64 {
    let expr_num = m.expr.evaluate_assignment(x);
    let recon = m
        .slack
        .evaluate_poly(&m.basis, x)
        .expect("slack gram indexed by its own basis");
    let mut max_dev: f64 = 0.0;
    for key in expr_num.support().chain(recon.support()) {
        let dev = (expr_num.coefficient(key) - recon.coefficient(key)).norm();
        max_dev = max_dev.max(dev);
    }
    max_dev
}

/// Degenerate-input check used by tests: a barrier polynomial that is
/// identically zero satisfies every condition except unsafe separation.
pub fn zero_barrier(dim: usize) -> CPolynomial {
    CPolynomial::zero(dim)
}
