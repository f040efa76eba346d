//! Implicit midpoint time stepping with a Picard outer iteration.
//!
//! One step solves `(U+ - U)/dt + L (U+ + U)/2 + D_x (m^(p+1)) / (p+1) = 0`
//! with `m = (U + U+)/2`, where `L` is the linear KP operator of the chosen
//! space discretization. The nonlinear term is frozen at the current Picard
//! iterate, so each iteration is one linear solve.

mod compact;
mod mixed;
mod modal;
mod spectral;

use thiserror::Error;

use crate::compact::CompactError;
use crate::field::{Field, FieldError, Grid2D};
use crate::linalg::{GmresParams, LinalgError};
use crate::spectral::SpectralError;

pub use compact::{cn_diagonal, CompactStepper};
pub use mixed::MixedStepper;
pub use modal::circulant_symbol;
pub use spectral::SpectralStepper;

#[derive(Debug, Error)]
pub enum StepError {
    #[error("Picard iteration diverged after {iterations} iterations (last update {last_delta:.3e})")]
    PicardDiverged { iterations: usize, last_delta: f64 },
    #[error("GMRES failed: {0}")]
    GmresFailed(#[source] LinalgError),
    #[error("scheme and grid are incompatible: {0}")]
    Incompatible(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Compact(#[from] CompactError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `u_t + u_xxx + u^p u_x + lambda ∂x⁻¹ u_yy = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub p: u32,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(p: u32, lambda: f64) -> Result<Self, StepError> {
        if p < 1 {
            return Err(StepError::InvalidModel(format!("p must be at least 1, got {p}")));
        }
        if lambda.abs() != 1.0 {
            return Err(StepError::InvalidModel(format!("lambda must be -1 or +1, got {lambda}")));
        }
        Ok(Self { p, lambda })
    }

    /// KP-I with quadratic nonlinearity.
    pub fn kp1() -> Self {
        Self { p: 1, lambda: -1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Compact { order: u32 },
    Spectral,
    Mixed { order_y: u32 },
}

impl SchemeKind {
    pub fn name(&self) -> String {
        match self {
            SchemeKind::Compact { order } => format!("compact-{order}"),
            SchemeKind::Spectral => "spectral".into(),
            SchemeKind::Mixed { order_y } => format!("mixed-{order_y}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardParams {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardParams {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 50 }
    }
}

/// Preconditioner for the compact Crank-Nicolson system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CnPreconditioner {
    /// Inverse main diagonal.
    #[default]
    Diagonal,
    /// Exact inverse of the linear operator through x-Fourier modes and
    /// banded y-solves; valid because every x-operator is circulant.
    Modal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub picard: PicardParams,
    pub gmres: GmresParams,
    pub preconditioner: CnPreconditioner,
    /// 2/3-rule truncation of the transformed nonlinear term.
    pub dealias: bool,
}

impl SchemeConfig {
    pub fn new(kind: SchemeKind) -> Self {
        Self {
            kind,
            picard: PicardParams::default(),
            gmres: GmresParams::default(),
            preconditioner: CnPreconditioner::default(),
            dealias: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepReport {
    pub picard_iters: usize,
    pub last_picard_delta: f64,
    pub gmres_total_iters: usize,
    pub max_gmres_residual: f64,
}

/// Cost of one Picard map evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub gmres_iters: usize,
    pub gmres_residual: f64,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Fixed-point iteration `U(s+1) = map(U(s))` from `U(0) = initial`.
///
/// Converged when `|U(s+1) - U(s)| / max(|U(s)|, 1) < tol`. Non-finite
/// iterates, three consecutive growing updates or `max_iter` iterations
/// without convergence give [`StepError::PicardDiverged`].
pub fn picard_iterate<F>(
    initial: &[f64],
    mut map: F,
    params: &PicardParams,
) -> Result<(Vec<f64>, StepReport), StepError>
where
    F: FnMut(&[f64]) -> Result<(Vec<f64>, SolveStats), StepError>,
{
    let mut report = StepReport::default();
    let mut current = initial.to_vec();
    let mut previous_diff = f64::INFINITY;
    let mut growing = 0;
    for iter in 1..=params.max_iter {
        let (next, stats) = map(&current)?;
        report.picard_iters = iter;
        report.gmres_total_iters += stats.gmres_iters;
        report.max_gmres_residual = report.max_gmres_residual.max(stats.gmres_residual);
        let diff: f64 = next.iter().zip(&current).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let delta = diff / l2(&current).max(1.0);
        report.last_picard_delta = delta;
        if !delta.is_finite() || next.iter().any(|v| !v.is_finite()) {
            return Err(StepError::PicardDiverged { iterations: iter, last_delta: delta });
        }
        if delta < params.tol {
            return Ok((next, report));
        }
        // successive updates growing in size means the map is expanding
        growing = if diff > previous_diff { growing + 1 } else { 0 };
        if growing >= 3 {
            return Err(StepError::PicardDiverged { iterations: iter, last_delta: delta });
        }
        previous_diff = diff;
        current = next;
    }
    Err(StepError::PicardDiverged {
        iterations: params.max_iter,
        last_delta: report.last_picard_delta,
    })
}

/// A time integrator with operators prebuilt for one grid and time step.
pub trait Stepper: Send {
    fn grid(&self) -> &Grid2D;
    fn dt(&self) -> f64;
    /// Advance the flat state by one step.
    fn step_values(&self, u: &[f64]) -> Result<(Vec<f64>, StepReport), StepError>;

    fn step(&self, u: &Field) -> Result<(Field, StepReport), StepError> {
        if u.grid() != self.grid() {
            return Err(StepError::Incompatible("state grid differs from the stepper grid".into()));
        }
        let (next, report) = self.step_values(u.values())?;
        Ok((Field::new(*self.grid(), next)?, report))
    }
}

pub fn build_stepper(
    grid: &Grid2D,
    model: &ModelParams,
    scheme: &SchemeConfig,
    dt: f64,
) -> Result<Box<dyn Stepper>, StepError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(StepError::Incompatible(format!("time step must be positive, got {dt}")));
    }
    ModelParams::new(model.p, model.lambda)?;
    Ok(match scheme.kind {
        SchemeKind::Compact { .. } => Box::new(CompactStepper::new(grid, model, scheme, dt)?),
        SchemeKind::Spectral => Box::new(SpectralStepper::new(grid, model, scheme, dt)?),
        SchemeKind::Mixed { .. } => Box::new(MixedStepper::new(grid, model, scheme, dt)?),
    })
}

/// Pointwise `((a + b) / 2)^(p+1)`.
pub(crate) fn midpoint_power(a: &[f64], b: &[f64], p: u32, out: &mut [f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o = (0.5 * (x + y)).powi(p as i32 + 1);
    }
}
