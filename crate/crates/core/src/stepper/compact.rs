use num_complex::Complex64;

use super::modal::{circulant_symbol, ModeSolver};
use super::{
    midpoint_power, picard_iterate, CnPreconditioner, ModelParams, SchemeConfig, SchemeKind, SolveStats,
    StepError, StepReport, Stepper,
};
use crate::compact::{build_antiderivative, build_operator, AntiderivativeOperator1D, BcKind, CompactOperator1D};
use crate::field::{apply_columns, apply_rows, BoundaryCondition, Grid2D, LineOperator};
use crate::linalg::{gmres, DiagonalPreconditioner, LinalgError, LinearMap};
use crate::spectral::RowTransform;

/// The compact operators of a full compact scheme on one grid.
#[derive(Debug, Clone)]
pub(crate) struct CompactOps {
    pub dx: CompactOperator1D,
    pub dxxx: CompactOperator1D,
    pub dyy: CompactOperator1D,
    pub anti: AntiderivativeOperator1D,
}

impl CompactOps {
    pub fn new(grid: &Grid2D, order: u32) -> Result<Self, StepError> {
        let (nx, ny) = (grid.nx(), grid.ny());
        if nx % 2 == 0 {
            return Err(StepError::Incompatible(format!(
                "the compact antiderivative needs an odd Nx, got {nx}"
            )));
        }
        Ok(Self {
            dx: build_operator(nx, grid.hx(), 1, order, BcKind::Periodic)?,
            dxxx: build_operator(nx, grid.hx(), 3, order, BcKind::Periodic)?,
            dyy: build_operator(ny, grid.hy(), 2, order, grid.bc_y().bc_kind())?,
            anti: build_antiderivative(nx, grid.hx(), order)?,
        })
    }
}

/// `A = I + dt/2 (I_y ⊗ D_xxx) + lambda dt/2 (D_yy ⊗ D̄x⁻¹)`.
struct CnOperator<'a> {
    ops: &'a CompactOps,
    nx: usize,
    half_dt: f64,
    lambda: f64,
}

impl LinearMap for CnOperator<'_> {
    fn dim(&self) -> usize {
        self.nx * self.ops.dyy.n_points()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = x.len();
        let mut t1 = vec![0.0; n];
        let mut t2 = vec![0.0; n];
        apply_rows(&self.ops.dxxx, self.nx, x, &mut t1);
        apply_columns(&self.ops.dyy, self.nx, x, &mut t2);
        apply_rows(&self.ops.anti, self.nx, &t2, y);
        let c = self.lambda * self.half_dt;
        for ((yi, xi), ti) in y.iter_mut().zip(x).zip(&t1) {
            *yi = xi + self.half_dt * ti + c * *yi;
        }
    }
}

/// Exact inverse of the CN operator: every x-operator is circulant, so each
/// x-mode decouples into the y-system `(1 + dt/2 s3) P_y + lambda dt/2 a Q_y`.
struct ModalPreconditioner {
    rows: RowTransform,
    py: crate::linalg::SparseMatrix<f64>,
    solver: ModeSolver,
    ny: usize,
    n: usize,
}

impl ModalPreconditioner {
    fn new(ops: &CompactOps, nx: usize, half_dt: f64, lambda: f64) -> Result<Self, StepError> {
        let ny = ops.dyy.n_points();
        let rows = RowTransform::new(nx, ny);
        let modes = rows.n_modes();
        let s3 = circulant_symbol(ops.dxxx.p(), ops.dxxx.q(), modes);
        let s1 = circulant_symbol(ops.dx.p(), ops.dx.q(), modes);
        let coeffs: Vec<(Complex64, Complex64)> = (0..modes)
            .map(|m| {
                let a = if m == 0 { Complex64::new(0.0, 0.0) } else { 1.0 / s1[m] };
                (1.0 + half_dt * s3[m], lambda * half_dt * a)
            })
            .collect();
        let solver = ModeSolver::new(ops.dyy.p(), ops.dyy.q(), &coeffs)?;
        Ok(Self { rows, py: ops.dyy.p().clone(), solver, ny, n: nx * ny })
    }
}

impl LinearMap for ModalPreconditioner {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let ny = self.ny;
        let mut spec = vec![Complex64::new(0.0, 0.0); self.rows.spectrum_len()];
        self.rows.forward(x, &mut spec);
        let mut rhs = vec![Complex64::new(0.0, 0.0); ny];
        for (m, line) in spec.chunks_exact_mut(ny).enumerate() {
            self.py.matvec_into(line, &mut rhs);
            self.solver.solve_in_place(m, &mut rhs);
            line.copy_from_slice(&rhs);
        }
        self.rows.inverse(&spec, y);
    }
}

/// Main diagonal of a line operator, one unit vector at a time.
fn line_diagonal(op: &dyn LineOperator) -> Vec<f64> {
    let n = op.len();
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    (0..n)
        .map(|i| {
            e[i] = 1.0;
            op.apply_line(&e, &mut col);
            e[i] = 0.0;
            col[i]
        })
        .collect()
}

fn diagonal_from_ops(ops: &CompactOps, half_dt: f64, lambda: f64) -> Vec<f64> {
    let dxxx = line_diagonal(&ops.dxxx);
    let anti = line_diagonal(&ops.anti);
    let dyy = line_diagonal(&ops.dyy);
    let mut diag = Vec::with_capacity(dxxx.len() * dyy.len());
    for dy in &dyy {
        for (d3, da) in dxxx.iter().zip(&anti) {
            diag.push(1.0 + half_dt * d3 + lambda * half_dt * dy * da);
        }
    }
    diag
}

/// Exact main diagonal of the compact CN matrix.
pub fn cn_diagonal(grid: &Grid2D, model: &ModelParams, order: u32, dt: f64) -> Result<Vec<f64>, StepError> {
    let ops = CompactOps::new(grid, order)?;
    Ok(diagonal_from_ops(&ops, 0.5 * dt, model.lambda))
}

/// Full compact scheme, linear systems solved by preconditioned GMRES.
pub struct CompactStepper {
    grid: Grid2D,
    model: ModelParams,
    scheme: SchemeConfig,
    dt: f64,
    ops: CompactOps,
    precond: Box<dyn LinearMap + Send + Sync>,
}

impl CompactStepper {
    pub fn new(grid: &Grid2D, model: &ModelParams, scheme: &SchemeConfig, dt: f64) -> Result<Self, StepError> {
        let SchemeKind::Compact { order } = scheme.kind else {
            return Err(StepError::Incompatible("not a compact scheme".into()));
        };
        if grid.bc_x() != BoundaryCondition::Periodic {
            return Err(StepError::Incompatible("x must be periodic".into()));
        }
        let ops = CompactOps::new(grid, order)?;
        let half_dt = 0.5 * dt;
        let precond: Box<dyn LinearMap + Send + Sync> = match scheme.preconditioner {
            CnPreconditioner::Diagonal => {
                Box::new(DiagonalPreconditioner::new(&diagonal_from_ops(&ops, half_dt, model.lambda)))
            }
            CnPreconditioner::Modal => Box::new(ModalPreconditioner::new(&ops, grid.nx(), half_dt, model.lambda)?),
        };
        Ok(Self { grid: *grid, model: *model, scheme: *scheme, dt, ops, precond })
    }

    fn operator(&self) -> CnOperator<'_> {
        CnOperator { ops: &self.ops, nx: self.grid.nx(), half_dt: 0.5 * self.dt, lambda: self.model.lambda }
    }

    /// Apply the CN matrix to a flat state.
    pub fn apply_cn(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.operator().apply(x, &mut y);
        y
    }

    /// Diagonal of the CN matrix.
    pub fn diagonal(&self) -> Vec<f64> {
        diagonal_from_ops(&self.ops, 0.5 * self.dt, self.model.lambda)
    }

    /// Solve `A x = b` with the configured GMRES and preconditioner.
    pub fn solve_cn(&self, b: &[f64], x0: Option<&[f64]>) -> Result<(Vec<f64>, SolveStats), StepError> {
        let a = self.operator();
        match gmres(&a, self.precond.as_ref(), b, x0, &self.scheme.gmres) {
            Ok((x, report)) => Ok((
                x,
                SolveStats { gmres_iters: report.iterations, gmres_residual: report.final_relative_residual },
            )),
            Err(e @ LinalgError::NoConvergence { .. }) => Err(StepError::GmresFailed(e)),
            Err(e) => Err(StepError::GmresFailed(e)),
        }
    }
}

impl Stepper for CompactStepper {
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
        let nx = self.grid.nx();
        let au = self.apply_cn(u);
        let linear: Vec<f64> = u.iter().zip(&au).map(|(x, a)| 2.0 * x - a).collect();
        let c = self.dt / (self.model.p as f64 + 1.0);
        let mut nl = vec![0.0; n];
        let mut dnl = vec![0.0; n];
        picard_iterate(
            u,
            |current| {
                midpoint_power(u, current, self.model.p, &mut nl);
                apply_rows(&self.ops.dx, nx, &nl, &mut dnl);
                let b: Vec<f64> = linear.iter().zip(&dnl).map(|(l, d)| l - c * d).collect();
                self.solve_cn(&b, Some(current))
            },
            &self.scheme.picard,
        )
    }
}
