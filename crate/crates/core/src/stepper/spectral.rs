use num_complex::Complex64;

use super::{midpoint_power, picard_iterate, ModelParams, SchemeConfig, SchemeKind, SolveStats, StepError, StepReport, Stepper};
use crate::field::{BoundaryCondition, Grid2D};
use crate::spectral::{wavenumbers, Fft1D, InverseWavenumberGrid, RowTransform};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier pseudo-spectral scheme in both directions. Every mode is
/// advanced independently, so each Picard iteration is two transforms and
/// a diagonal solve.
pub struct SpectralStepper {
    grid: Grid2D,
    model: ModelParams,
    scheme: SchemeConfig,
    dt: f64,
    rows: RowTransform,
    fft_y: Fft1D,
    /// `1 + i dt/2 σ` and `1 / (1 - i dt/2 σ)`, mode-major.
    forward_factor: Vec<Complex64>,
    inverse_denominator: Vec<Complex64>,
    /// `-dt i k / (p+1)` per x-mode, zero where masked by dealiasing.
    nonlinear_factor: Vec<Complex64>,
    y_mask: Vec<bool>,
}

impl SpectralStepper {
    pub fn new(grid: &Grid2D, model: &ModelParams, scheme: &SchemeConfig, dt: f64) -> Result<Self, StepError> {
        if scheme.kind != SchemeKind::Spectral {
            return Err(StepError::Incompatible("not a spectral scheme".into()));
        }
        if grid.bc_y() != BoundaryCondition::Periodic {
            return Err(StepError::Incompatible("the spectral scheme needs a periodic y direction".into()));
        }
        let (nx, ny) = (grid.nx(), grid.ny());
        let kx = wavenumbers(nx, 2.0 * grid.lx())?;
        let ky = wavenumbers(ny, 2.0 * grid.ly())?;
        let inv = InverseWavenumberGrid::new(&kx);
        let rows = RowTransform::new(nx, ny);
        let modes = rows.n_modes();
        let half_dt = 0.5 * dt;
        let mut forward_factor = Vec::with_capacity(modes * ny);
        let mut inverse_denominator = Vec::with_capacity(modes * ny);
        let mut nonlinear_factor = Vec::with_capacity(modes);
        let nyq = nx / 2;
        for m in 0..modes {
            let k = if m == nyq { 0.0 } else { kx.values()[m] };
            for &q in ky.values() {
                let sigma = k.powi(3) - model.lambda * q * q * inv.values()[m];
                forward_factor.push(Complex64::new(1.0, half_dt * sigma));
                inverse_denominator.push(1.0 / Complex64::new(1.0, -half_dt * sigma));
            }
            let keep = !scheme.dealias || 3 * m <= nx;
            let f = if keep { Complex64::new(0.0, -dt * k / (model.p as f64 + 1.0)) } else { ZERO };
            nonlinear_factor.push(f);
        }
        let y_mask = (0..ny).map(|l| !scheme.dealias || 3 * l.min(ny - l) <= ny).collect();
        Ok(Self {
            grid: *grid,
            model: *model,
            scheme: *scheme,
            dt,
            rows,
            fft_y: Fft1D::new(ny),
            forward_factor,
            inverse_denominator,
            nonlinear_factor,
            y_mask,
        })
    }

    fn forward(&self, v: &[f64]) -> Vec<Complex64> {
        let mut spec = vec![ZERO; self.rows.spectrum_len()];
        self.rows.forward(v, &mut spec);
        let mut scratch = vec![ZERO; self.fft_y.scratch_len()];
        self.fft_y.forward_many(&mut spec, &mut scratch);
        spec
    }

    fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        let mut scratch = vec![ZERO; self.fft_y.scratch_len()];
        self.fft_y.inverse_many(&mut spec, &mut scratch);
        let mut v = vec![0.0; self.grid.len()];
        self.rows.inverse(&spec, &mut v);
        v
    }
}

impl Stepper for SpectralStepper {
    fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn dt(&self) -> f64 {
        self.dt
    }

    fn step_values(&self, u: &[f64]) -> Result<(Vec<f64>, StepReport), StepError> {
        let n = self.grid.len();
        if u.len() != n {
            return Err(StepError::Incompatible(format!("state has {} values, grid {}", u.len(), n)));
        }
        let ny = self.grid.ny();
        let u_hat = self.forward(u);
        let linear: Vec<Complex64> = u_hat.iter().zip(&self.forward_factor).map(|(a, f)| a * f).collect();
        let mut nl = vec![0.0; n];
        picard_iterate(
            u,
            |current| {
                midpoint_power(u, current, self.model.p, &mut nl);
                let mut spec = self.forward(&nl);
                for (idx, s) in spec.iter_mut().enumerate() {
                    let (m, l) = (idx / ny, idx % ny);
                    let f = if self.y_mask[l] { self.nonlinear_factor[m] } else { ZERO };
                    *s = (linear[idx] + f * *s) * self.inverse_denominator[idx];
                }
                Ok((self.inverse(spec), SolveStats::default()))
            },
            &self.scheme.picard,
        )
    }
}
