//! Solvers for u_t + u_xxx + u^p u_x + λ ∂x⁻¹ u_yy = 0 with compact,
//! Fourier spectral and mixed discretizations.

// Index loops mirror the matrix formulas in the numerical kernels.
#![allow(clippy::needless_range_loop)]

pub mod analytic;
pub mod compact;
pub mod diagnostics;
pub mod field;
pub mod linalg;
pub mod runner;
pub mod spectral;
pub mod stepper;
