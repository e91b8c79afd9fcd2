//! Language-neutral semidefinite feasibility problems.
//!
//! A [`ConicProblem`] owns real decision variables, a list of real symmetric
//! PSD blocks whose entries are affine in the variables, affine equality
//! constraints and an optional linear objective. Backends translate this
//! into their native form.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

/// Index of one real decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Error)]
pub enum ConicError {
    #[error("PSD block {block}: expected {expected} triangle entries, got {got}")]
    BlockEntryCount {
        block: usize,
        expected: usize,
        got: usize,
    },
    #[error("variable {0:?} out of range")]
    VarOutOfRange(VarId),
    #[error("problem dump is malformed at line {line}: {msg}")]
    MalformedDump { line: usize, msg: String },
}

/// Real-valued affine expression `constant + Σ coeff·x_i`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RealAffine {
    pub constant: f64,
    pub terms: BTreeMap<VarId, f64>,
}

impl RealAffine {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn var(v: VarId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, 1.0);
        Self {
            constant: 0.0,
            terms,
        }
    }

    pub fn add_term(&mut self, v: VarId, coeff: f64) {
        let c = self.terms.entry(v).or_insert(0.0);
        *c += coeff;
        if c.abs() < 1e-15 {
            self.terms.remove(&v);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            constant: self.constant * s,
            terms: self.terms.iter().map(|(v, c)| (*v, c * s)).collect(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(v, c)| c * x[v.0]).sum::<f64>()
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.terms.is_empty()
    }
}

/// Complex-valued affine expression over real decision variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub constant: C64,
    pub terms: BTreeMap<VarId, C64>,
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    /// `x_v` as a complex expression (optionally times a coefficient).
    pub fn scaled_var(v: VarId, coeff: C64) -> Self {
        let mut e = Self::zero();
        e.add_term(v, coeff);
        e
    }

    pub fn add_term(&mut self, v: VarId, coeff: C64) {
        let c = self.terms.entry(v).or_insert(C64::new(0.0, 0.0));
        *c += coeff;
        if c.norm() < 1e-15 {
            self.terms.remove(&v);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.constant += other.constant;
        for (v, c) in &other.terms {
            self.add_term(*v, *c);
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            constant: self.constant * s,
            terms: self.terms.iter().map(|(v, c)| (*v, c * s)).collect(),
        }
    }

    pub fn conjugated(&self) -> Self {
        Self {
            constant: self.constant.conj(),
            terms: self.terms.iter().map(|(v, c)| (*v, c.conj())).collect(),
        }
    }

    pub fn real_part(&self) -> RealAffine {
        RealAffine {
            constant: self.constant.re,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.re.abs() >= 1e-15)
                .map(|(v, c)| (*v, c.re))
                .collect(),
        }
    }

    pub fn imag_part(&self) -> RealAffine {
        RealAffine {
            constant: self.constant.im,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.im.abs() >= 1e-15)
                .map(|(v, c)| (*v, c.im))
                .collect(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> C64 {
        let mut acc = self.constant;
        for (v, c) in &self.terms {
            acc += c * x[v.0];
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.constant.norm() == 0.0 && self.terms.is_empty()
    }
}

/// Real symmetric PSD constraint of dimension `dim`; entries are stored as
/// the upper triangle in column-major order (`(0,0), (0,1), (1,1), ...`),
/// each affine in the decision variables.
#[derive(Debug, Clone)]
pub struct PsdBlock {
    pub dim: usize,
    pub entries: Vec<RealAffine>,
    /// Diagnostic label, e.g. which constraint instance the block came from.
    pub label: String,
}

impl PsdBlock {
    pub fn triangle_len(dim: usize) -> usize {
        dim * (dim + 1) / 2
    }

    /// Index into `entries` for `(row, col)` with `row ≤ col`.
    pub fn triangle_index(row: usize, col: usize) -> usize {
        debug_assert!(row <= col);
        col * (col + 1) / 2 + row
    }

    pub fn entry(&self, row: usize, col: usize) -> &RealAffine {
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        &self.entries[Self::triangle_index(r, c)]
    }

    /// Evaluates the full symmetric matrix under an assignment.
    pub fn evaluate(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for col in 0..self.dim {
            for row in 0..=col {
                let v = self.entries[Self::triangle_index(row, col)].evaluate(x);
                m[(row, col)] = v;
                m[(col, row)] = v;
            }
        }
        m
    }
}

/// Equality row `Σ coeff·x_i = rhs`.
#[derive(Debug, Clone)]
pub struct EqualityRow {
    pub terms: Vec<(VarId, f64)>,
    pub rhs: f64,
    pub label: String,
}

/// Semidefinite feasibility problem with an optional linear objective.
#[derive(Debug, Clone, Default)]
pub struct ConicProblem {
    num_vars: usize,
    var_labels: Vec<String>,
    pub psd_blocks: Vec<PsdBlock>,
    pub equalities: Vec<EqualityRow>,
    /// Minimized when present.
    pub objective: Vec<(VarId, f64)>,
    /// Set when two identical rows demanded different right-hand sides or a
    /// constant row had a nonzero residual; such problems are infeasible
    /// before any solver runs.
    pub structurally_infeasible: Option<String>,
    seen_rows: BTreeMap<Vec<(usize, u64)>, f64>,
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_var(&mut self, label: impl Into<String>) -> VarId {
        let id = VarId(self.num_vars);
        self.num_vars += 1;
        self.var_labels.push(label.into());
        id
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn var_label(&self, v: VarId) -> &str {
        &self.var_labels[v.0]
    }

    pub fn add_psd_block(&mut self, block: PsdBlock) -> Result<(), ConicError> {
        let expected = PsdBlock::triangle_len(block.dim);
        if block.entries.len() != expected {
            return Err(ConicError::BlockEntryCount {
                block: self.psd_blocks.len(),
                expected,
                got: block.entries.len(),
            });
        }
        self.psd_blocks.push(block);
        Ok(())
    }

    /// Adds `expr = 0` after canonicalization. Zero rows are dropped;
    /// duplicate rows are emitted once; a constant nonzero row or a duplicate
    /// with a conflicting right-hand side marks the problem structurally
    /// infeasible.
    pub fn add_equality(&mut self, expr: &RealAffine, label: impl Into<String>) {
        const RESIDUAL_TOL: f64 = 1e-11;
        let label = label.into();
        let terms: Vec<(VarId, f64)> = expr
            .terms
            .iter()
            .filter(|(_, c)| c.abs() > 1e-14)
            .map(|(v, c)| (*v, *c))
            .collect();
        let rhs = -expr.constant;
        if terms.is_empty() {
            if rhs.abs() > RESIDUAL_TOL && self.structurally_infeasible.is_none() {
                self.structurally_infeasible =
                    Some(format!("constant equality {label} demands {rhs} = 0"));
            }
            return;
        }
        let signature: Vec<(usize, u64)> =
            terms.iter().map(|(v, c)| (v.0, c.to_bits())).collect();
        match self.seen_rows.get(&signature) {
            Some(prev) if (prev - rhs).abs() <= RESIDUAL_TOL => return,
            Some(prev) => {
                if self.structurally_infeasible.is_none() {
                    self.structurally_infeasible = Some(format!(
                        "equality {label} conflicts with an identical row ({prev} vs {rhs})"
                    ));
                }
                return;
            }
            None => {
                self.seen_rows.insert(signature, rhs);
            }
        }
        self.equalities.push(EqualityRow { terms, rhs, label });
    }

    /// Checks a candidate assignment: every PSD block must have minimum
    /// eigenvalue ≥ `-1e-7` and every equality residual must stay ≤ `1e-6`.
    pub fn validate_assignment(&self, x: &[f64]) -> Result<(), String> {
        if x.len() != self.num_vars {
            return Err(format!(
                "assignment has {} entries for {} variables",
                x.len(),
                self.num_vars
            ));
        }
        for (i, row) in self.equalities.iter().enumerate() {
            let lhs: f64 = row.terms.iter().map(|(v, c)| c * x[v.0]).sum();
            let residual = (lhs - row.rhs).abs();
            if residual > 1e-6 {
                return Err(format!(
                    "equality {i} ({}) residual {residual:.3e}",
                    row.label
                ));
            }
        }
        for (i, block) in self.psd_blocks.iter().enumerate() {
            let m = block.evaluate(x);
            let min_eig = m
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if min_eig < -1e-7 {
                return Err(format!(
                    "PSD block {i} ({}) has minimum eigenvalue {min_eig:.3e}",
                    block.label
                ));
            }
        }
        Ok(())
    }

    /// Plain-text dump: PSD block dimensions, sparse entries, equality rows
    /// and right-hand sides, with round-trippable decimals.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "conic-problem v1");
        let _ = writeln!(out, "vars {}", self.num_vars);
        for block in &self.psd_blocks {
            let _ = writeln!(out, "psd {} # {}", block.dim, block.label);
            for col in 0..block.dim {
                for row in 0..=col {
                    let e = &block.entries[PsdBlock::triangle_index(row, col)];
                    if e.is_zero() {
                        continue;
                    }
                    let mut line = format!("  e {row} {col} {:.17e}", e.constant);
                    for (v, c) in &e.terms {
                        let _ = write!(line, " {}:{:.17e}", v.0, c);
                    }
                    let _ = writeln!(out, "{line}");
                }
            }
        }
        for row in &self.equalities {
            let mut line = format!("eq {:.17e}", row.rhs);
            for (v, c) in &row.terms {
                let _ = write!(line, " {}:{:.17e}", v.0, c);
            }
            let _ = writeln!(out, "{line} # {}", row.label);
        }
        if !self.objective.is_empty() {
            let mut line = String::from("min");
            for (v, c) in &self.objective {
                let _ = write!(line, " {}:{:.17e}", v.0, c);
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }

    /// Parses the [`dump`](Self::dump) format back; used for offline
    /// debugging and backend substitution.
    pub fn parse_dump(text: &str) -> Result<Self, ConicError> {
        let mut problem = ConicProblem::new();
        let mut lines = text.lines().enumerate().peekable();
        let fail = |line: usize, msg: &str| ConicError::MalformedDump {
            line: line + 1,
            msg: msg.to_string(),
        };
        match lines.next() {
            Some((_, l)) if l.trim() == "conic-problem v1" => {}
            other => {
                return Err(fail(0, &format!("bad header: {other:?}")));
            }
        }
        while let Some((ln, raw)) = lines.next() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut parts = body.split_whitespace();
            match parts.next() {
                Some("vars") => {
                    let n: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| fail(ln, "bad vars line"))?;
                    for i in 0..n {
                        problem.new_var(format!("x{i}"));
                    }
                }
                Some("psd") => {
                    let dim: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| fail(ln, "bad psd line"))?;
                    let mut entries = vec![RealAffine::zero(); PsdBlock::triangle_len(dim)];
                    while let Some((eln, next)) = lines.peek() {
                        let trimmed = next.split('#').next().unwrap_or("").trim();
                        if !trimmed.starts_with("e ") {
                            break;
                        }
                        let eln = *eln;
                        let mut p = trimmed.split_whitespace();
                        p.next();
                        let row: usize = p
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| fail(eln, "bad entry row"))?;
                        let col: usize = p
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| fail(eln, "bad entry col"))?;
                        let constant: f64 = p
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| fail(eln, "bad entry constant"))?;
                        let mut affine = RealAffine::constant(constant);
                        for tok in p {
                            let (v, c) = tok
                                .split_once(':')
                                .ok_or_else(|| fail(eln, "bad entry term"))?;
                            let v: usize =
                                v.parse().map_err(|_| fail(eln, "bad term var"))?;
                            let c: f64 =
                                c.parse().map_err(|_| fail(eln, "bad term coeff"))?;
                            affine.add_term(VarId(v), c);
                        }
                        entries[PsdBlock::triangle_index(row, col)] = affine;
                        lines.next();
                    }
                    problem.add_psd_block(PsdBlock {
                        dim,
                        entries,
                        label: String::new(),
                    })?;
                }
                Some("eq") => {
                    let rhs: f64 = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| fail(ln, "bad eq rhs"))?;
                    let mut affine = RealAffine::constant(-rhs);
                    for tok in parts {
                        let (v, c) = tok
                            .split_once(':')
                            .ok_or_else(|| fail(ln, "bad eq term"))?;
                        let v: usize = v.parse().map_err(|_| fail(ln, "bad eq var"))?;
                        let c: f64 = c.parse().map_err(|_| fail(ln, "bad eq coeff"))?;
                        affine.add_term(VarId(v), c);
                    }
                    problem.add_equality(&affine, "parsed");
                }
                Some("min") => {
                    for tok in parts {
                        let (v, c) = tok
                            .split_once(':')
                            .ok_or_else(|| fail(ln, "bad objective term"))?;
                        let v: usize = v.parse().map_err(|_| fail(ln, "bad obj var"))?;
                        let c: f64 = c.parse().map_err(|_| fail(ln, "bad obj coeff"))?;
                        problem.objective.push((VarId(v), c));
                    }
                }
                Some(other) => {
                    return Err(fail(ln, &format!("unknown directive {other}")));
                }
                None => {}
            }
        }
        Ok(problem)
    }
}
