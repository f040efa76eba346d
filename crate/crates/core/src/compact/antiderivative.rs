use super::operator::{BcKind, CompactOperator1D};
use super::CompactError;
use crate::linalg::{AlmostBandedLu, SparseMatrix};

/// Periodic antiderivative `(Q̄)⁻¹ P̄` on the zero-mean subspace.
///
/// `P̄` and `Q̄` are the first-derivative matrices with their last row
/// replaced by ones, which encodes `Σ F = Σ F' = 0`. For even `N` the
/// alternating column combination of `Q̄` vanishes, so only odd sizes are
/// accepted.
#[derive(Debug, Clone)]
pub struct AntiderivativeOperator1D {
    n_points: usize,
    h: f64,
    accuracy_order: u32,
    p_bar: SparseMatrix<f64>,
    q_bar: SparseMatrix<f64>,
    q_bar_factor: AlmostBandedLu<f64>,
}

/// Replace the last row of `m` by ones.
pub(crate) fn close_last_row(m: &SparseMatrix<f64>) -> SparseMatrix<f64> {
    let n = m.dim();
    m.with_row_replaced(n - 1, (0..n).map(|j| (j, 1.0)))
}

impl AntiderivativeOperator1D {
    pub fn new(n_points: usize, h: f64, accuracy_order: u32) -> Result<Self, CompactError> {
        if n_points.is_multiple_of(2) {
            return Err(CompactError::EvenGridSize { n_points });
        }
        let dx = CompactOperator1D::new(n_points, h, 1, accuracy_order, BcKind::Periodic)?;
        let p_bar = close_last_row(dx.p());
        let q_bar = close_last_row(dx.q());
        // Border wide enough to hold the wrap-around corners, and leaving an
        // even-sized antisymmetric leading block (odd ones are singular).
        let width = dx.coefficients().rhs_half_width();
        let border = if (n_points - width).is_multiple_of(2) { width } else { width + 1 };
        let q_bar_factor = AlmostBandedLu::new(&q_bar, border)?;
        Ok(Self {
            n_points,
            h,
            accuracy_order,
            p_bar,
            q_bar,
            q_bar_factor,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn accuracy_order(&self) -> u32 {
        self.accuracy_order
    }

    pub fn p_bar(&self) -> &SparseMatrix<f64> {
        &self.p_bar
    }

    pub fn q_bar(&self) -> &SparseMatrix<f64> {
        &self.q_bar
    }

    /// True if the factorization fell back to dense LU.
    pub fn uses_dense_factor(&self) -> bool {
        self.q_bar_factor.is_dense()
    }

    /// Zero-mean primitive of `f`. The mean of `f` is removed first, so the
    /// result is the primitive of its zero-mean part.
    pub fn apply_into(&self, f: &[f64], out: &mut [f64]) -> Result<(), CompactError> {
        let n = self.n_points;
        if f.len() != n || out.len() != n {
            return Err(CompactError::DimensionMismatch {
                expected: n,
                got: f.len().min(out.len()),
            });
        }
        let mean = f.iter().sum::<f64>() / n as f64;
        // out = P̄ (f - mean); P̄ rows sum to a constant so subtracting
        // the mean commutes with the banded rows.
        self.p_bar.matvec_into(f, out);
        let row_sum: f64 = self.p_bar.row(0).map(|(_, v)| v).sum();
        for v in out[..n - 1].iter_mut() {
            *v -= row_sum * mean;
        }
        out[n - 1] -= n as f64 * mean;
        self.q_bar_factor.solve_in_place(out);
        Ok(())
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>, CompactError> {
        let mut out = vec![0.0; self.n_points];
        self.apply_into(f, &mut out)?;
        Ok(out)
    }
}

pub fn build_antiderivative(
    n_points: usize,
    h: f64,
    accuracy_order: u32,
) -> Result<AntiderivativeOperator1D, CompactError> {
    AntiderivativeOperator1D::new(n_points, h, accuracy_order)
}
