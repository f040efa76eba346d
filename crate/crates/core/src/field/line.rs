use crate::compact::{AntiderivativeOperator1D, CompactOperator1D};
use crate::linalg::DenseMatrix;
use crate::spectral::SpectralOperator1D;

/// A linear map acting on one grid line. Callers guarantee both slices
/// have length [`LineOperator::len`].
pub trait LineOperator {
    fn len(&self) -> usize;
    fn apply_line(&self, input: &[f64], out: &mut [f64]);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityOperator(pub usize);

impl LineOperator for IdentityOperator {
    fn len(&self) -> usize {
        self.0
    }
    fn apply_line(&self, input: &[f64], out: &mut [f64]) {
        out.copy_from_slice(input);
    }
}

impl LineOperator for CompactOperator1D {
    fn len(&self) -> usize {
        self.n_points()
    }
    fn apply_line(&self, input: &[f64], out: &mut [f64]) {
        self.apply_into(input, out).expect("line length checked by caller");
    }
}

impl LineOperator for AntiderivativeOperator1D {
    fn len(&self) -> usize {
        self.n_points()
    }
    fn apply_line(&self, input: &[f64], out: &mut [f64]) {
        self.apply_into(input, out).expect("line length checked by caller");
    }
}

impl LineOperator for SpectralOperator1D {
    fn len(&self) -> usize {
        self.n_points()
    }
    fn apply_line(&self, input: &[f64], out: &mut [f64]) {
        self.apply_unchecked(input, out);
    }
}

impl LineOperator for DenseMatrix<f64> {
    fn len(&self) -> usize {
        self.rows()
    }
    fn apply_line(&self, input: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.matvec(input));
    }
}
