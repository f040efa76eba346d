use num_complex::Complex64;

use super::modal::ModeSolver;
use super::{midpoint_power, picard_iterate, ModelParams, SchemeConfig, SchemeKind, SolveStats, StepError, StepReport, Stepper};
use crate::compact::{build_operator, CompactOperator1D};
use crate::field::Grid2D;
use crate::spectral::{wavenumbers, RowTransform};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier in x, compact `D_yy` in y. Each x-mode gives a banded complex
/// system in y, factorized once:
/// `[(1 - i dt/2 k³) P_y - i lambda dt/(2k) Q_y] U+ = rhs`.
pub struct MixedStepper {
    grid: Grid2D,
    model: ModelParams,
    scheme: SchemeConfig,
    dt: f64,
    rows: RowTransform,
    dyy: CompactOperator1D,
    solver: ModeSolver,
    /// Right-hand side coefficients of `P_y` and `Q_y` per mode.
    rhs_coeffs: Vec<(Complex64, Complex64)>,
    nonlinear_factor: Vec<Complex64>,
}

impl MixedStepper {
    pub fn new(grid: &Grid2D, model: &ModelParams, scheme: &SchemeConfig, dt: f64) -> Result<Self, StepError> {
        let SchemeKind::Mixed { order_y } = scheme.kind else {
            return Err(StepError::Incompatible("not a mixed scheme".into()));
        };
        let (nx, ny) = (grid.nx(), grid.ny());
        let kx = wavenumbers(nx, 2.0 * grid.lx())?;
        let dyy = build_operator(ny, grid.hy(), 2, order_y, grid.bc_y().bc_kind())?;
        let rows = RowTransform::new(nx, ny);
        let half_dt = 0.5 * dt;
        let nyq = nx / 2;
        let mut lhs = Vec::with_capacity(rows.n_modes());
        let mut rhs_coeffs = Vec::with_capacity(rows.n_modes());
        let mut nonlinear_factor = Vec::with_capacity(rows.n_modes());
        for m in 0..rows.n_modes() {
            let (k, inv_k) = if m == 0 || m == nyq { (0.0, 0.0) } else { (kx.values()[m], 1.0 / kx.values()[m]) };
            let cq = Complex64::new(0.0, model.lambda * half_dt * inv_k);
            lhs.push((Complex64::new(1.0, -half_dt * k.powi(3)), -cq));
            rhs_coeffs.push((Complex64::new(1.0, half_dt * k.powi(3)), cq));
            let keep = !scheme.dealias || 3 * m <= nx;
            nonlinear_factor.push(if keep { Complex64::new(0.0, -dt * k / (model.p as f64 + 1.0)) } else { ZERO });
        }
        let solver = ModeSolver::new(dyy.p(), dyy.q(), &lhs)?;
        Ok(Self { grid: *grid, model: *model, scheme: *scheme, dt, rows, dyy, solver, rhs_coeffs, nonlinear_factor })
    }
}

impl Stepper for MixedStepper {
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
        let (p, q) = (self.dyy.p(), self.dyy.q());
        let mut u_hat = vec![ZERO; self.rows.spectrum_len()];
        self.rows.forward(u, &mut u_hat);
        let mut linear = vec![ZERO; u_hat.len()];
        let mut pu = vec![ZERO; ny];
        let mut qu = vec![ZERO; ny];
        for (m, (src, dst)) in u_hat.chunks_exact(ny).zip(linear.chunks_exact_mut(ny)).enumerate() {
            let (cp, cq) = self.rhs_coeffs[m];
            p.matvec_into(src, &mut pu);
            q.matvec_into(src, &mut qu);
            for ((d, a), b) in dst.iter_mut().zip(&pu).zip(&qu) {
                *d = cp * a + cq * b;
            }
        }
        let mut nl = vec![0.0; n];
        let mut spec = vec![ZERO; u_hat.len()];
        let mut line = vec![ZERO; ny];
        picard_iterate(
            u,
            |current| {
                midpoint_power(u, current, self.model.p, &mut nl);
                self.rows.forward(&nl, &mut spec);
                for (m, (s, lin)) in spec.chunks_exact_mut(ny).zip(linear.chunks_exact(ny)).enumerate() {
                    p.matvec_into(s, &mut line);
                    let f = self.nonlinear_factor[m];
                    for ((o, l), pn) in s.iter_mut().zip(lin).zip(&line) {
                        *o = l + f * pn;
                    }
                    self.solver.solve_in_place(m, s);
                }
                let mut next = vec![0.0; n];
                self.rows.inverse(&spec, &mut next);
                Ok((next, SolveStats::default()))
            },
            &self.scheme.picard,
        )
    }
}
