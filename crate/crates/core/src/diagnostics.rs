//! Conserved quantities, error norms and convergence-order fits.

use thiserror::Error;

use crate::compact::{build_antiderivative, build_operator, BcKind};
use crate::field::{apply_rows, apply_columns, BoundaryCondition, Field, LineOperator};
use crate::spectral::{wavenumbers, SpectralOperator1D};
use crate::stepper::{ModelParams, SchemeKind, StepError};

#[derive(Debug, Error, PartialEq)]
pub enum DiagnosticsError {
    #[error("convergence fit needs at least two samples with distinct positive h and positive errors")]
    DegenerateSamples,
}

/// One line of the diagnostics time series.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DiagnosticsRow {
    pub step: u64,
    pub time: f64,
    pub mass: f64,
    pub l2: f64,
    pub linf: f64,
    pub energy: f64,
    pub max_xline_mass: f64,
    pub picard_iters: usize,
    pub gmres_iters: usize,
}

impl DiagnosticsRow {
    pub const CSV_HEADER: &'static str = "step,time,mass,l2,linf,energy,max_xline_mass,picard_iters,gmres_iters";

    /// Values are written with Rust's shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
            self.step,
            self.time,
            self.mass,
            self.l2,
            self.linf,
            self.energy,
            self.max_xline_mass,
            self.picard_iters,
            self.gmres_iters
        )
    }
}

fn cell(f: &Field) -> f64 {
    f.grid().hx() * f.grid().hy()
}

/// `∬ u dx dy` with uniform weights.
pub fn mass(f: &Field) -> f64 {
    f.values().iter().sum::<f64>() * cell(f)
}

pub fn l2_norm(f: &Field) -> f64 {
    (f.values().iter().map(|v| v * v).sum::<f64>() * cell(f)).sqrt()
}

pub fn linf_norm(f: &Field) -> f64 {
    f.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `max_y |∫ u dx|`.
pub fn max_xline_mass(f: &Field) -> f64 {
    let hx = f.grid().hx();
    (0..f.grid().ny())
        .map(|j| (f.row(j).iter().sum::<f64>() * hx).abs())
        .fold(0.0, f64::max)
}

/// `(∬ (u - exact(x, y, t))² dx dy)^{1/2}`.
pub fn l2_error(f: &Field, exact: impl Fn(f64, f64, f64) -> f64, t: f64) -> f64 {
    let g = f.grid();
    let mut sum = 0.0;
    for j in 0..g.ny() {
        let y = g.y(j);
        for (i, v) in f.row(j).iter().enumerate() {
            let d = v - exact(g.x(i), y, t);
            sum += d * d;
        }
    }
    (sum * cell(f)).sqrt()
}

/// Least-squares slope of `log err` against `log h`.
pub fn convergence_order(samples: &[(f64, f64)]) -> Result<f64, DiagnosticsError> {
    if samples.len() < 2 || samples.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0 && h.is_finite() && e.is_finite())) {
        return Err(DiagnosticsError::DegenerateSamples);
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(DiagnosticsError::DegenerateSamples);
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

/// The `∂x`, `∂y` and `∂x⁻¹` of one discretization family, used by
/// [`energy`] so the diagnostic matches the scheme.
pub struct EnergyOperators {
    dx: Box<dyn LineOperator + Send + Sync>,
    dy: Box<dyn LineOperator + Send + Sync>,
    anti: Box<dyn LineOperator + Send + Sync>,
}

type BoxedLine = Box<dyn LineOperator + Send + Sync>;

impl EnergyOperators {
    pub fn new(grid: &crate::field::Grid2D, kind: SchemeKind) -> Result<Self, StepError> {
        let (nx, ny) = (grid.nx(), grid.ny());
        let spectral_x = || -> Result<(BoxedLine, BoxedLine), StepError> {
            let kx = wavenumbers(nx, 2.0 * grid.lx())?;
            Ok((Box::new(SpectralOperator1D::derivative(&kx, 1)), Box::new(SpectralOperator1D::antiderivative(&kx))))
        };
        Ok(match kind {
            SchemeKind::Compact { order } => Self {
                dx: Box::new(build_operator(nx, grid.hx(), 1, order, BcKind::Periodic)?),
                dy: Box::new(build_operator(ny, grid.hy(), 1, order, grid.bc_y().bc_kind())?),
                anti: Box::new(build_antiderivative(nx, grid.hx(), order)?),
            },
            SchemeKind::Spectral => {
                if grid.bc_y() != BoundaryCondition::Periodic {
                    return Err(StepError::Incompatible("the spectral scheme needs a periodic y direction".into()));
                }
                let (dx, anti) = spectral_x()?;
                let ky = wavenumbers(ny, 2.0 * grid.ly())?;
                Self { dx, dy: Box::new(SpectralOperator1D::derivative(&ky, 1)), anti }
            }
            SchemeKind::Mixed { order_y } => {
                let (dx, anti) = spectral_x()?;
                Self { dx, dy: Box::new(build_operator(ny, grid.hy(), 1, order_y, grid.bc_y().bc_kind())?), anti }
            }
        })
    }
}

/// `∬ u^{p+2}/((p+1)(p+2)) - u_x²/2 + lambda (∂x⁻¹ u_y)²/2 dx dy`.
pub fn energy(f: &Field, model: &ModelParams, ops: &EnergyOperators) -> f64 {
    let nx = f.grid().nx();
    let n = f.values().len();
    let mut ux = vec![0.0; n];
    let mut uy = vec![0.0; n];
    let mut iy = vec![0.0; n];
    apply_rows(ops.dx.as_ref(), nx, f.values(), &mut ux);
    apply_columns(ops.dy.as_ref(), nx, f.values(), &mut uy);
    apply_rows(ops.anti.as_ref(), nx, &uy, &mut iy);
    let p = model.p as i32;
    let c = 1.0 / ((p + 1) * (p + 2)) as f64;
    let sum: f64 = f
        .values()
        .iter()
        .zip(&ux)
        .zip(&iy)
        .map(|((u, a), b)| c * u.powi(p + 2) - 0.5 * a * a + 0.5 * model.lambda * b * b)
        .sum();
    sum * cell(f)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use approx::assert_relative_eq;

    use super::*;
    use crate::analytic::initial_state;
    use crate::field::Grid2D;

    #[test]
    fn norms_of_simple_fields() {
        let g = Grid2D::periodic(1.0, 1.0, 16, 8).unwrap();
        let ones = Field::from_fn(g, |_, _| 1.0).unwrap();
        assert_relative_eq!(l2_norm(&ones), 2.0, max_relative = 1e-14);
        assert_relative_eq!(mass(&ones), 4.0, max_relative = 1e-14);
        let odd = Field::from_fn(g, |x, y| (std::f64::consts::PI * x).sin() * (1.0 + y * y)).unwrap();
        assert!(mass(&odd).abs() < 1e-13);
        assert!(max_xline_mass(&odd) < 1e-13);
        assert_eq!(linf_norm(&Field::from_fn(g, |x, _| -3.0 * x).unwrap()), 3.0);
    }

    #[test]
    fn gaussian_xx_peak() {
        let g = Grid2D::periodic(10.0, 2.5, 201, 50).unwrap();
        let u = initial_state("gaussian-xx", &g, &BTreeMap::from([("prefactor".to_string(), 3.0)])).unwrap();
        assert_relative_eq!(linf_norm(&u), 6.0, max_relative = 1e-14);
        let u = initial_state("gaussian-xx", &g, &BTreeMap::from([("prefactor".to_string(), 4.5)])).unwrap();
        assert_relative_eq!(linf_norm(&u), 9.0, max_relative = 1e-14);
    }

    #[test]
    fn l2_error_is_linear_in_perturbation() {
        let g = Grid2D::periodic(2.0, 1.0, 32, 16).unwrap();
        let exact = |x: f64, y: f64, t: f64| (x - t).cos() * y.sin();
        let u = Field::from_fn(g, |x, y| exact(x, y, 0.5)).unwrap();
        assert!(l2_error(&u, exact, 0.5) < 1e-14);
        let eps = 1e-3;
        let area = 8.0f64;
        let v = Field::from_fn(g, |x, y| exact(x, y, 0.5) + eps / area.sqrt()).unwrap();
        assert_relative_eq!(l2_error(&v, exact, 0.5), eps, max_relative = 1e-12);
    }

    #[test]
    fn convergence_fits() {
        let s: Vec<(f64, f64)> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&h: &f64| (h, h.powi(4))).collect();
        assert!((convergence_order(&s).unwrap() - 4.0).abs() < 1e-12);
        let table = [(0.42, 9.38e-4), (0.28, 1.92e-4), (0.21, 6.04e-5)];
        let slope = convergence_order(&table).unwrap();
        assert!((3.85..=4.05).contains(&slope), "{slope}");
        assert_eq!(convergence_order(&[(0.1, 2.0), (0.2, 2.0)]).unwrap(), 0.0);
        assert_eq!(convergence_order(&[(0.1, 1.0)]), Err(DiagnosticsError::DegenerateSamples));
        assert_eq!(convergence_order(&[(0.1, 1.0), (0.1, 2.0)]), Err(DiagnosticsError::DegenerateSamples));
        assert_eq!(convergence_order(&[(0.1, 0.0), (0.2, 1.0)]), Err(DiagnosticsError::DegenerateSamples));
    }

    #[test]
    fn energy_of_zero_and_y_independent_fields() {
        let model = ModelParams::kp1();
        let g = Grid2D::periodic(5.0, 2.0, 63, 16).unwrap();
        {
            let kind = SchemeKind::Compact { order: 6 };
            let ops = EnergyOperators::new(&g, kind).unwrap();
            assert_eq!(energy(&Field::zeros(g), &model, &ops), 0.0);
            let w = std::f64::consts::PI / 5.0;
            let u = Field::from_fn(g, |x, _| (w * x).sin()).unwrap();
            // ∬ sin^3 = 0, ∬ u_x^2 / 2 = w^2/2 * area/2
            let expected = -0.5 * w * w * 0.5 * 40.0;
            assert_relative_eq!(energy(&u, &model, &ops), expected, max_relative = 1e-6);
        }
        let gs = Grid2D::periodic(5.0, 2.0, 64, 16).unwrap();
        let w = std::f64::consts::PI / 5.0;
        for kind in [SchemeKind::Spectral, SchemeKind::Mixed { order_y: 4 }] {
            let ops = EnergyOperators::new(&gs, kind).unwrap();
            let u = Field::from_fn(gs, |x, _| (w * x).sin()).unwrap();
            assert_relative_eq!(energy(&u, &model, &ops), -0.5 * w * w * 0.5 * 40.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn csv_row_format() {
        let row = DiagnosticsRow { step: 3, time: 0.5, mass: -0.0, l2: 1.0, linf: 2.5, energy: 1e-20, ..Default::default() };
        assert_eq!(row.to_csv(), "3,5e-1,-0e0,1e0,2.5e0,1e-20,0e0,0,0");
        assert_eq!(DiagnosticsRow::CSV_HEADER.split(',').count(), 9);
    }
}
