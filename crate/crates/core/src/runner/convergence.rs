//! Grid-refinement sweeps against the exact Zaitsev solution.

use crate::analytic::zaitsev;
use crate::diagnostics::{convergence_order, l2_error};
use crate::stepper::SchemeKind;

use super::config::ExperimentConfig;
use super::run::{simulate, NullObserver, Termination};
use super::{ConfigError, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineAxis {
    X,
    Y,
}

impl std::str::FromStr for RefineAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x" => Ok(RefineAxis::X),
            "y" => Ok(RefineAxis::Y),
            other => Err(format!("expected x or y, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub n: usize,
    pub h: f64,
    pub l2_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub axis: RefineAxis,
    pub points: Vec<ConvergencePoint>,
    /// Slope between consecutive points.
    pub pairwise_slopes: Vec<f64>,
    /// Least-squares slope over all points.
    pub fitted_slope: f64,
}

/// The scheme's parity requirement on the refined axis.
fn parity_fix(cfg: &ExperimentConfig, axis: RefineAxis, n: usize) -> usize {
    let need_odd = axis == RefineAxis::X && matches!(cfg.scheme.kind, SchemeKind::Compact { .. });
    let need_even = match axis {
        RefineAxis::X => !need_odd,
        RefineAxis::Y => cfg.scheme.kind == SchemeKind::Spectral,
    };
    if (need_odd && n.is_multiple_of(2)) || (need_even && n % 2 == 1) {
        n + 1
    } else {
        n
    }
}

/// `N`, `1.5 N` and `2 N` on the refined axis, adjusted to the scheme's parity.
pub fn default_sizes(cfg: &ExperimentConfig, axis: RefineAxis) -> Vec<usize> {
    let n = match axis {
        RefineAxis::X => cfg.grid.nx,
        RefineAxis::Y => cfg.grid.ny,
    };
    [n, 3 * n / 2, 2 * n].iter().map(|&m| parity_fix(cfg, axis, m)).collect()
}

/// Run the config once and return the L2 error against the exact Zaitsev
/// wave at `t_end`.
pub fn zaitsev_error(cfg: &ExperimentConfig) -> Result<f64, RunError> {
    if cfg.initial.state != "zaitsev" {
        return Err(ConfigError::validation("initial.state", "the error needs the exact zaitsev state").into());
    }
    let z = cfg.zaitsev_params().expect("zaitsev state")?;
    let t0 = cfg.initial.params.get("t0").copied().unwrap_or(0.0);
    let mut c = cfg.clone();
    c.outputs.diag_every = c.time.n_steps();
    c.outputs.snapshot_every = 0;
    let outcome = simulate(&c, &mut NullObserver)?;
    if outcome.termination != Termination::Completed {
        return Err(RunError::Internal(format!(
            "run with {}x{} points ended early: {}",
            c.grid.nx,
            c.grid.ny,
            outcome.termination.describe()
        )));
    }
    Ok(l2_error(&outcome.final_state, |x, y, t| zaitsev(&z, x, y, t + t0), outcome.final_time))
}

/// Run the config at each size on `axis` and measure the L2 error against
/// the exact Zaitsev wave at `t_end`.
pub fn convergence_sweep(
    cfg: &ExperimentConfig,
    axis: RefineAxis,
    sizes: &[usize],
) -> Result<ConvergenceReport, RunError> {
    if cfg.initial.state != "zaitsev" {
        return Err(ConfigError::validation("initial.state", "a convergence sweep needs the exact zaitsev state").into());
    }
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut c = cfg.clone();
        match axis {
            RefineAxis::X => c.grid.nx = n,
            RefineAxis::Y => c.grid.ny = n,
        }
        let l2_error = zaitsev_error(&c)?;
        let g = c.grid.build()?;
        let h = match axis {
            RefineAxis::X => g.hx(),
            RefineAxis::Y => g.hy(),
        };
        points.push(ConvergencePoint { n, h, l2_error });
    }
    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.h, p.l2_error)).collect();
    let pairwise_slopes = samples
        .windows(2)
        .map(convergence_order)
        .collect::<Result<Vec<_>, _>>()?;
    let fitted_slope = convergence_order(&samples)?;
    Ok(ConvergenceReport { axis, points, pairwise_slopes, fitted_slope })
}
