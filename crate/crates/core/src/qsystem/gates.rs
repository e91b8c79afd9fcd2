//! Gate library and unitary modes.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::C64;

/// Entrywise tolerance for the unitarity check `‖U†U − I‖_max`.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GateError {
    #[error("unknown gate name: {0}")]
    UnknownGate(String),
    #[error("matrix is not unitary: max deviation {0:.3e}")]
    NotUnitary(f64),
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("marked index {m} out of range for {n} qubits")]
    MarkOutOfRange { n: u32, m: usize },
}

/// A unitary matrix acting on the state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMode {
    matrix: DMatrix<C64>,
}

impl UnitaryMode {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self, GateError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(GateError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let gram = matrix.adjoint() * &matrix;
        let id = DMatrix::<C64>::identity(matrix.nrows(), matrix.ncols());
        let dev = (gram - id).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if dev > UNITARITY_TOL {
            return Err(GateError::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, w: &DVector<C64>) -> DVector<C64> {
        &self.matrix * w
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self, GateError> {
        Self::new(&self.matrix * &other.matrix)
    }

    /// Kronecker product; unitarity is preserved.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The named single-qubit gates plus CNOT, with exact entries from
/// `{0, ±1, ±1/√2}`.
pub fn gate(name: &str) -> Result<UnitaryMode, GateError> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let m = match name {
        "I" => DMatrix::identity(2, 2),
        "H" => DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
        "Z" => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        "X" => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        "CNOT" => {
            let mut m = DMatrix::zeros(4, 4);
            m[(0, 0)] = c(1.0, 0.0);
            m[(1, 1)] = c(1.0, 0.0);
            m[(2, 3)] = c(1.0, 0.0);
            m[(3, 2)] = c(1.0, 0.0);
            m
        }
        other => return Err(GateError::UnknownGate(other.to_string())),
    };
    UnitaryMode::new(m)
}

/// n-fold tensor power.
pub fn tensor_power(g: &UnitaryMode, n: u32) -> UnitaryMode {
    assert!(n >= 1);
    let mut acc = g.clone();
    for _ in 1..n {
        acc = acc.tensor(g);
    }
    acc
}

/// Grover oracle `O|x⟩ = (−1)^{h(x)}|x⟩` with a single marked element `m`:
/// diagonal with −1 at index `m`.
pub fn grover_oracle(n: u32, m: usize) -> Result<UnitaryMode, GateError> {
    let dim = 1usize << n;
    if m >= dim {
        return Err(GateError::MarkOutOfRange { n, m });
    }
    let mut mat = DMatrix::<C64>::identity(dim, dim);
    mat[(m, m)] = c(-1.0, 0.0);
    UnitaryMode::new(mat)
}

/// Grover diffusion `D = H^{⊗n}(2|0^n⟩⟨0^n| − I)H^{⊗n} = 2|u⟩⟨u| − I` with
/// `u` the uniform superposition: entries `2/2^n − δ_jk`.
pub fn grover_diffusion(n: u32) -> UnitaryMode {
    let dim = 1usize << n;
    let off = 2.0 / dim as f64;
    let mat = DMatrix::from_fn(dim, dim, |j, k| {
        if j == k {
            c(off - 1.0, 0.0)
        } else {
            c(off, 0.0)
        }
    });
    UnitaryMode::new(mat).expect("diffusion is unitary by construction")
}
