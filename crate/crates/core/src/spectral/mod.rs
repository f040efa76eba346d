//! Fourier-side derivative and antiderivative operators on periodic grids.
//!
//! Wavenumbers use the full box as the period: a grid of `n` nodes with
//! spacing `h` has period `n h`, and mode `m` has wavenumber `2π m / (n h)`.

mod fft;
mod rows;

use num_complex::Complex64;
use thiserror::Error;

pub use fft::Fft1D;
pub use rows::RowTransform;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("spectral grids need an even number of modes, got {n_modes}")]
    UnsupportedSize { n_modes: usize },
    #[error("period length must be positive and finite, got {period}")]
    InvalidPeriod { period: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("inverse transform left an imaginary residue of {residue:.3e}")]
    ImaginaryResidue { residue: f64 },
}

/// Signed wavenumbers in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberGrid {
    period_length: f64,
    values: Vec<f64>,
}

impl WavenumberGrid {
    pub fn n_modes(&self) -> usize {
        self.values.len()
    }

    pub fn period_length(&self) -> f64 {
        self.period_length
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the unmatched `-n/2` mode.
    pub fn nyquist(&self) -> usize {
        self.values.len() / 2
    }

    /// Fourier symbol of `d^order/dx^order`. The Nyquist entry is zeroed for
    /// odd orders, which keeps real data real.
    pub fn derivative_symbol(&self, order: u32) -> Vec<Complex64> {
        let nyq = self.nyquist();
        self.values
            .iter()
            .enumerate()
            .map(|(m, &k)| {
                if order % 2 == 1 && m == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, k).powu(order)
                }
            })
            .collect()
    }
}

/// Reciprocal wavenumbers, zero at the zero mode and at the Nyquist mode.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseWavenumberGrid {
    values: Vec<f64>,
}

impl InverseWavenumberGrid {
    pub fn new(w: &WavenumberGrid) -> Self {
        let nyq = w.nyquist();
        let values = w
            .values
            .iter()
            .enumerate()
            .map(|(m, &k)| if m == 0 || m == nyq { 0.0 } else { 1.0 / k })
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Symbol of the antiderivative, `1 / (i k)`.
    pub fn symbol(&self) -> Vec<Complex64> {
        self.values.iter().map(|&v| Complex64::new(0.0, -v)).collect()
    }
}

pub fn wavenumbers(n_modes: usize, period_length: f64) -> Result<WavenumberGrid, SpectralError> {
    if n_modes < 2 || !n_modes.is_multiple_of(2) {
        return Err(SpectralError::UnsupportedSize { n_modes });
    }
    if !(period_length > 0.0 && period_length.is_finite()) {
        return Err(SpectralError::InvalidPeriod { period: period_length });
    }
    let scale = 2.0 * std::f64::consts::PI / period_length;
    let half = n_modes as isize / 2;
    let values = (0..n_modes as isize)
        .map(|m| if m < half { m } else { m - n_modes as isize })
        .map(|m| m as f64 * scale)
        .collect();
    Ok(WavenumberGrid { period_length, values })
}

/// Zero the mode-0 coefficient.
pub fn project_mass_zero(f_hat: &[Complex64]) -> Vec<Complex64> {
    let mut out = f_hat.to_vec();
    if let Some(first) = out.first_mut() {
        *first = Complex64::new(0.0, 0.0);
    }
    out
}

/// Diagonal Fourier multiplier on real periodic data.
#[derive(Debug, Clone)]
pub struct SpectralOperator1D {
    symbol: Vec<Complex64>,
    fft: Fft1D,
}

impl SpectralOperator1D {
    pub fn from_symbol(symbol: Vec<Complex64>) -> Self {
        let fft = Fft1D::new(symbol.len());
        Self { symbol, fft }
    }

    pub fn derivative(w: &WavenumberGrid, order: u32) -> Self {
        Self::from_symbol(w.derivative_symbol(order))
    }

    pub fn antiderivative(w: &WavenumberGrid) -> Self {
        Self::from_symbol(InverseWavenumberGrid::new(w).symbol())
    }

    pub fn n_points(&self) -> usize {
        self.symbol.len()
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    /// Apply without the imaginary-residue check.
    pub fn apply_unchecked(&self, f: &[f64], out: &mut [f64]) -> f64 {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.symbol) {
            *b *= s;
        }
        self.fft.inverse(&mut buf);
        let mut residue = 0.0f64;
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b.re;
            residue = residue.max(b.im.abs());
        }
        residue
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>, SpectralError> {
        let n = self.n_points();
        if f.len() != n {
            return Err(SpectralError::DimensionMismatch { expected: n, got: f.len() });
        }
        let mut out = vec![0.0; n];
        let residue = self.apply_unchecked(f, &mut out);
        let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = self.symbol.iter().map(|s| s.norm()).fold(1.0, f64::max);
        if residue > 1e-12 * norm * scale {
            return Err(SpectralError::ImaginaryResidue { residue });
        }
        Ok(out)
    }
}

pub fn spectral_derivative(f: &[f64], w: &WavenumberGrid, order: u32) -> Result<Vec<f64>, SpectralError> {
    if f.len() != w.n_modes() {
        return Err(SpectralError::DimensionMismatch { expected: w.n_modes(), got: f.len() });
    }
    SpectralOperator1D::derivative(w, order).apply(f)
}

/// Zero-mean primitive; the mean of `f` is discarded.
pub fn spectral_antiderivative(f: &[f64], w_inv: &InverseWavenumberGrid) -> Result<Vec<f64>, SpectralError> {
    if f.len() != w_inv.values.len() {
        return Err(SpectralError::DimensionMismatch { expected: w_inv.values.len(), got: f.len() });
    }
    SpectralOperator1D::from_symbol(w_inv.symbol()).apply(f)
}

#[cfg(test)]
mod tests;
