//! Hermitian sum-of-squares machinery: monomial bases, Gram
//! parameterizations, realification into real PSD blocks, and assembly and
//! solution of the resulting conic problem through a pluggable backend.

pub mod backend;
pub mod basis;
pub mod clarabel_backend;
pub mod conic;
pub mod gram;
pub mod ops;
pub mod realgram;
pub mod sympoly;

pub use backend::{solve, MockBackend, SolveOutcome, SolverBackend};
pub use basis::MonomialBasis;
pub use clarabel_backend::ClarabelBackend;
pub use conic::{ConicProblem, EqualityRow, LinExpr, PsdBlock, RealAffine, VarId};
pub use gram::{extract_decomposition, gram_to_poly, realify_numeric, HermitianGram, SymbolicGram};
pub use ops::{hsos_check, match_coefficients, match_coefficients_with, GramForm, HsosCheckOutcome, HsosError, SlackGram};
pub use realgram::RealGram;
pub use sympoly::SymPoly;
