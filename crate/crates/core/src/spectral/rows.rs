use num_complex::Complex64;

use super::Fft1D;

/// Real-to-half-spectrum transform of every x-row of a y-major array.
///
/// The spectrum is stored mode-major: `spec[m * ny + j]` for
/// `m = 0..=nx/2`, so each mode's y-line is contiguous.
#[derive(Debug, Clone)]
pub struct RowTransform {
    nx: usize,
    ny: usize,
    fft: Fft1D,
}

impl RowTransform {
    pub fn new(nx: usize, ny: usize) -> Self {
        Self { nx, ny, fft: Fft1D::new(nx) }
    }

    pub fn n_modes(&self) -> usize {
        self.nx / 2 + 1
    }

    pub fn spectrum_len(&self) -> usize {
        self.n_modes() * self.ny
    }

    pub fn forward(&self, v: &[f64], spec: &mut [Complex64]) {
        let (nx, ny) = (self.nx, self.ny);
        debug_assert_eq!(v.len(), nx * ny);
        debug_assert_eq!(spec.len(), self.spectrum_len());
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.scratch_len()];
        self.fft.forward_many(&mut buf, &mut scratch);
        for j in 0..ny {
            for m in 0..self.n_modes() {
                spec[m * ny + j] = buf[j * nx + m];
            }
        }
    }

    /// Inverse of [`RowTransform::forward`], filling negative modes by
    /// Hermitian symmetry.
    pub fn inverse(&self, spec: &[Complex64], v: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        let mut buf = vec![Complex64::new(0.0, 0.0); nx * ny];
        for j in 0..ny {
            let row = &mut buf[j * nx..(j + 1) * nx];
            for m in 0..self.n_modes() {
                let c = spec[m * ny + j];
                row[m] = c;
                if m > 0 && nx - m > m {
                    row[nx - m] = c.conj();
                }
            }
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.scratch_len()];
        self.fft.inverse_many(&mut buf, &mut scratch);
        for (o, c) in v.iter_mut().zip(&buf) {
            *o = c.re;
        }
    }
}
