//! Direct and iterative linear solvers.

mod banded;
mod bordered;
mod dense;
mod gmres;
mod scalar;
mod sparse;

use thiserror::Error;

pub use banded::{BandedLu, BandedMatrix};
pub use bordered::{AlmostBandedLu, DENSE_FALLBACK_MAX};
pub use dense::{dense_solve, DenseLu, DenseMatrix};
pub use gmres::{gmres, DiagonalPreconditioner, GmresParams, IdentityMap, LinearMap, SolveReport};
pub use scalar::Scalar;
pub use sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is singular (pivot {pivot} below tolerance)")]
    SingularMatrix { pivot: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("GMRES breakdown at iteration {iteration}")]
    Breakdown { iteration: usize },
    #[error("GMRES did not converge after {} iterations (relative residual {:.3e})", report.iterations, report.final_relative_residual)]
    NoConvergence { best: Vec<f64>, report: Box<SolveReport> },
}
