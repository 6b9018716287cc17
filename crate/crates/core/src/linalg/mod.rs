//! Sparse storage and the dense/iterative solvers the discrete layer needs.

mod dense;
mod sparse;

pub use dense::{
    cg_jacobi, dot, eig_gen_sym, eig_sym, norm, residual_norms, symmetrized, DenseCholesky, EigenPairs, SpdSolver,
    SymPinv, CG_TOL, DENSE_LIMIT,
};
pub use sparse::SparseMatrix;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),
    #[error("solve failed: {0}")]
    SolveFailure(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
