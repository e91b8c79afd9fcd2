//! Clarabel-based conic backend.
//!
//! Maps a [`ConicProblem`] onto Clarabel's `min ½xᵀPx + qᵀx s.t. Ax + s = b,
//! s ∈ K` form: equalities go into a zero cone, each PSD block becomes a
//! scaled-triangle PSD cone via `s = svec(M(x))`.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::backend::{SolveOutcome, SolverBackend};
use super::conic::{ConicProblem, PsdBlock};

// Links the LAPACK/BLAS symbols Clarabel's SDP support needs.
extern crate openblas_src as _;

#[derive(Debug, Clone)]
pub struct ClarabelBackend {
    pub max_iter: u32,
    pub verbose: bool,
    /// Feasibility/gap tolerance (absolute and relative).
    pub tol: f64,
    /// Wall-clock limit per solve, in seconds (0 disables).
    pub time_limit: f64,
    /// Ruiz equilibration scaling range; barrier problems mix magnitudes
    /// across many orders, so this is wider than Clarabel's default.
    pub equilibrate_range: f64,
    pub static_regularization: f64,
}

impl Default for ClarabelBackend {
    fn default() -> Self {
        Self {
            max_iter: 500,
            verbose: false,
            tol: 1e-8,
            time_limit: 0.0,
            equilibrate_range: 1e6,
            static_regularization: 1e-8,
        }
    }
}

struct Triplets {
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Triplets {
    fn new() -> Self {
        Self {
            rows: Vec::new(),
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    fn push(&mut self, row: usize, col: usize, val: f64) {
        if val != 0.0 {
            self.rows.push(row);
            self.cols.push(col);
            self.vals.push(val);
        }
    }

    fn into_csc(self, nrows: usize, ncols: usize) -> CscMatrix<f64> {
        let mut order: Vec<usize> = (0..self.vals.len()).collect();
        order.sort_by_key(|&i| (self.cols[i], self.rows[i]));
        let mut colptr = vec![0usize; ncols + 1];
        let mut rowval = Vec::with_capacity(order.len());
        let mut nzval = Vec::with_capacity(order.len());
        for &i in &order {
            colptr[self.cols[i] + 1] += 1;
            rowval.push(self.rows[i]);
            nzval.push(self.vals[i]);
        }
        for c in 0..ncols {
            colptr[c + 1] += colptr[c];
        }
        CscMatrix::new(nrows, ncols, colptr, rowval, nzval)
    }
}

impl SolverBackend for ClarabelBackend {
    fn solve_raw(&self, problem: &ConicProblem) -> SolveOutcome {
        let n = problem.num_vars();
        let sqrt2 = std::f64::consts::SQRT_2;

        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        let mut a = Triplets::new();
        let mut b = Vec::new();
        let mut row_idx = 0usize;

        if !problem.equalities.is_empty() {
            cones.push(SupportedConeT::ZeroConeT(problem.equalities.len()));
            for eq in &problem.equalities {
                for (v, c) in &eq.terms {
                    a.push(row_idx, v.0, *c);
                }
                b.push(eq.rhs);
                row_idx += 1;
            }
        }

        // svec(M(x)) ∈ PSD cone, i.e. -F x + s = g with s = svec(M(x)).
        for block in &problem.psd_blocks {
            cones.push(SupportedConeT::PSDTriangleConeT(block.dim));
            for col in 0..block.dim {
                for row in 0..=col {
                    let entry = &block.entries[PsdBlock::triangle_index(row, col)];
                    let scale = if row == col { 1.0 } else { sqrt2 };
                    for (v, c) in &entry.terms {
                        a.push(row_idx, v.0, -c * scale);
                    }
                    b.push(entry.constant * scale);
                    row_idx += 1;
                }
            }
        }

        let a = a.into_csc(row_idx, n);
        let p = CscMatrix::new(n, n, vec![0; n + 1], vec![], vec![]);
        let mut q = vec![0.0; n];
        for (v, c) in &problem.objective {
            q[v.0] += c;
        }

        // Single-threaded keeps solves bit-reproducible across runs.
        let settings = match DefaultSettingsBuilder::default()
            .verbose(self.verbose)
            .max_iter(self.max_iter)
            .time_limit(if self.time_limit > 0.0 {
                self.time_limit
            } else {
                f64::INFINITY
            })
            .tol_gap_abs(self.tol)
            .tol_gap_rel(self.tol)
            .tol_feas(self.tol)
            .equilibrate_min_scaling(1.0 / self.equilibrate_range)
            .equilibrate_max_scaling(self.equilibrate_range)
            .static_regularization_constant(self.static_regularization)
            .max_threads(1)
            .build()
        {
            Ok(s) => s,
            Err(e) => return SolveOutcome::SolverError(format!("settings: {e}")),
        };
        let mut solver = match DefaultSolver::new(&p, &q, &a, &b, &cones, settings) {
            Ok(s) => s,
            Err(e) => return SolveOutcome::SolverError(format!("setup: {e:?}")),
        };
        solver.solve();

        match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => {
                SolveOutcome::Feasible(solver.solution.x.clone())
            }
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                SolveOutcome::Infeasible
            }
            status => SolveOutcome::SolverError(format!("{status:?}")),
        }
    }

    fn name(&self) -> &str {
        "clarabel"
    }
}
