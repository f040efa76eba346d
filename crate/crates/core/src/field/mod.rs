//! Rectangular grids, real 2D states and Kronecker-structured operator
//! application.
//!
//! States are stored y-major with x fastest: flat index `j * nx + i`.
//! An operator `B ⊗ A` acts with `A` along x (rows) and `B` along y.

mod line;

use thiserror::Error;

use crate::compact::{BcKind, Parity};
use crate::linalg::DenseMatrix;

pub use line::{IdentityOperator, LineOperator};

/// Largest `nx * ny` accepted by [`dense_assemble`].
pub const DENSE_ASSEMBLY_MAX: usize = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dense assembly of {unknowns} unknowns exceeds the limit of {DENSE_ASSEMBLY_MAX}")]
    TooLargeForDense { unknowns: usize },
}

/// Boundary condition along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Periodic,
    Dirichlet0,
    Neumann0,
}

impl BoundaryCondition {
    /// Boundary treatment for a compact operator along this axis.
    pub fn bc_kind(self) -> BcKind {
        match self {
            BoundaryCondition::Periodic => BcKind::Periodic,
            BoundaryCondition::Dirichlet0 => BcKind::Reflect(Parity::Odd),
            BoundaryCondition::Neumann0 => BcKind::Reflect(Parity::Even),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Dirichlet0 => "dirichlet",
            BoundaryCondition::Neumann0 => "neumann",
        }
    }
}

/// `[-lx, lx] x [-ly, ly]` sampled with `nx x ny` nodes.
///
/// Periodic axes with an even node count start at the left end,
/// `x_i = -lx + i hx`; with an odd count they are shifted by half a cell so
/// the nodes are symmetric about 0 and the centre is a node. Walled axes are
/// cell-centred (`y_j = -ly + (j + 1/2) hy`) so the walls sit half a cell
/// outside the first and last nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    bc_x: BoundaryCondition,
    bc_y: BoundaryCondition,
}

impl Grid2D {
    pub fn new(
        lx: f64,
        ly: f64,
        nx: usize,
        ny: usize,
        bc_x: BoundaryCondition,
        bc_y: BoundaryCondition,
    ) -> Result<Self, FieldError> {
        if !(lx > 0.0 && lx.is_finite() && ly > 0.0 && ly.is_finite()) {
            return Err(FieldError::InvalidGrid(format!("half-lengths must be positive, got {lx}, {ly}")));
        }
        if nx < 2 || ny < 2 {
            return Err(FieldError::InvalidGrid(format!("need at least 2 nodes per axis, got {nx}x{ny}")));
        }
        if bc_x != BoundaryCondition::Periodic {
            return Err(FieldError::InvalidGrid("the x direction must be periodic".into()));
        }
        Ok(Self { lx, ly, nx, ny, bc_x, bc_y })
    }

    /// Periodic in both directions.
    pub fn periodic(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self, FieldError> {
        Self::new(lx, ly, nx, ny, BoundaryCondition::Periodic, BoundaryCondition::Periodic)
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn bc_x(&self) -> BoundaryCondition {
        self.bc_x
    }
    pub fn bc_y(&self) -> BoundaryCondition {
        self.bc_y
    }
    pub fn hx(&self) -> f64 {
        2.0 * self.lx / self.nx as f64
    }
    pub fn hy(&self) -> f64 {
        2.0 * self.ly / self.ny as f64
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        axis_node(self.lx, self.nx, self.bc_x, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        axis_node(self.ly, self.ny, self.bc_y, j)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
}

fn axis_node(half: f64, n: usize, bc: BoundaryCondition, i: usize) -> f64 {
    let h = 2.0 * half / n as f64;
    let offset = match bc {
        BoundaryCondition::Periodic if n.is_multiple_of(2) => 0.0,
        _ => 0.5,
    };
    -half + (i as f64 + offset) * h
}

/// Real state on a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid2D,
    values: Vec<f64>,
}

impl Field {
    /// Rejects wrong lengths and non-finite entries.
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { values: vec![0.0; grid.len()], grid }
    }

    /// Sample `f(x, y)` at the grid nodes.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self, FieldError> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            let y = grid.y(j);
            for i in 0..grid.nx() {
                values.push(f(grid.x(i), y));
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[j * nx..(j + 1) * nx]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// `out = (I_y ⊗ A) v` on flat y-major data.
pub fn apply_rows(op: &dyn LineOperator, nx: usize, v: &[f64], out: &mut [f64]) {
    debug_assert_eq!(op.len(), nx);
    for (src, dst) in v.chunks_exact(nx).zip(out.chunks_exact_mut(nx)) {
        op.apply_line(src, dst);
    }
}

/// `out = (B ⊗ I_x) v` on flat y-major data.
pub fn apply_columns(op: &dyn LineOperator, nx: usize, v: &[f64], out: &mut [f64]) {
    let ny = op.len();
    debug_assert_eq!(v.len(), nx * ny);
    let mut col = vec![0.0; ny];
    let mut res = vec![0.0; ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = v[j * nx + i];
        }
        op.apply_line(&col, &mut res);
        for j in 0..ny {
            out[j * nx + i] = res[j];
        }
    }
}

fn check_len(op: &dyn LineOperator, expected: usize) -> Result<(), FieldError> {
    if op.len() != expected {
        return Err(FieldError::DimensionMismatch { expected, got: op.len() });
    }
    Ok(())
}

pub fn apply_along_x(op: &dyn LineOperator, f: &Field) -> Result<Field, FieldError> {
    check_len(op, f.grid.nx())?;
    let mut out = vec![0.0; f.values.len()];
    apply_rows(op, f.grid.nx(), &f.values, &mut out);
    Ok(Field { grid: f.grid, values: out })
}

pub fn apply_along_y(op: &dyn LineOperator, f: &Field) -> Result<Field, FieldError> {
    check_len(op, f.grid.ny())?;
    let mut out = vec![0.0; f.values.len()];
    apply_columns(op, f.grid.nx(), &f.values, &mut out);
    Ok(Field { grid: f.grid, values: out })
}

/// Explicit matrix of a line operator, column by column.
pub fn line_matrix(op: &dyn LineOperator) -> DenseMatrix<f64> {
    let n = op.len();
    DenseMatrix::from_columns(n, |e| {
        let mut out = vec![0.0; n];
        op.apply_line(e, &mut out);
        out
    })
}

/// Dense `op_y ⊗ op_x` for small grids.
pub fn dense_assemble(
    op_x: &dyn LineOperator,
    op_y: &dyn LineOperator,
    grid: &Grid2D,
) -> Result<DenseMatrix<f64>, FieldError> {
    if grid.len() > DENSE_ASSEMBLY_MAX {
        return Err(FieldError::TooLargeForDense { unknowns: grid.len() });
    }
    check_len(op_x, grid.nx())?;
    check_len(op_y, grid.ny())?;
    Ok(line_matrix(op_y).kron(&line_matrix(op_x)))
}

#[cfg(test)]
mod tests;
