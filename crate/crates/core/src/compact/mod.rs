//! High-order compact finite-difference operators in one dimension.

mod antiderivative;
mod coefficients;
mod operator;

use thiserror::Error;

use crate::linalg::LinalgError;

pub use antiderivative::{build_antiderivative, AntiderivativeOperator1D};
pub use coefficients::{boundary_closure, interior_coefficients, BoundaryClosure, CoefficientSet, EdgePosition};
pub use operator::{build_operator, BcKind, CompactOperator1D, Parity};

#[cfg(test)]
pub(crate) use antiderivative::close_last_row;

#[derive(Debug, Error)]
pub enum CompactError {
    #[error("unsupported (derivative order {derivative_order}, accuracy order {accuracy_order})")]
    UnsupportedOrder { derivative_order: u32, accuracy_order: u32 },
    #[error("one-sided closures exist only for the first derivative, not order {derivative_order}")]
    UnsupportedBoundary { derivative_order: u32 },
    #[error("grid of {n_points} points is too small for the stencil (need at least {min})")]
    GridTooSmall { n_points: usize, min: usize },
    #[error("antiderivative needs an odd number of points, got {n_points}")]
    EvenGridSize { n_points: usize },
    #[error("grid spacing must be positive and finite, got {h}")]
    InvalidSpacing { h: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{stencil_points}-point stencil cannot reach order {accuracy_order}")]
    UnderdeterminedStencil { stencil_points: usize, accuracy_order: u32 },
    #[error("{stencil_points}-point stencil leaves free parameters at order {accuracy_order}")]
    InvalidStencil { stencil_points: usize, accuracy_order: u32 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
