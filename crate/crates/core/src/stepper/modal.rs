use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{AlmostBandedLu, LinalgError, SparseMatrix};

/// Fourier multiplier of the circulant operator `P⁻¹ Q` at each mode
/// `m = 0..n_modes`, read off the first rows of `P` and `Q`.
pub fn circulant_symbol(p: &SparseMatrix<f64>, q: &SparseMatrix<f64>, n_modes: usize) -> Vec<Complex64> {
    let n = p.dim();
    let row_symbol = |a: &SparseMatrix<f64>, m: usize| -> Complex64 {
        a.row(0)
            .map(|(d, v)| Complex64::from_polar(v, 2.0 * PI * ((d * m) % n) as f64 / n as f64))
            .sum()
    };
    (0..n_modes).map(|m| row_symbol(q, m) / row_symbol(p, m)).collect()
}

/// Number of trailing rows/columns holding periodic wrap-around entries.
fn wrap_border(mats: &[&SparseMatrix<f64>]) -> usize {
    let n = mats[0].dim();
    mats.iter()
        .flat_map(|a| a.triplets())
        .map(|(i, j, _)| i.abs_diff(j))
        .filter(|&d| 2 * d > n)
        .map(|d| n - d)
        .max()
        .unwrap_or(0)
}

/// Factorized y-systems `c_p(m) P + c_q(m) Q`, one per x-mode.
#[derive(Debug, Clone)]
pub(crate) struct ModeSolver {
    factors: Vec<AlmostBandedLu<Complex64>>,
}

impl ModeSolver {
    pub fn new(
        p: &SparseMatrix<f64>,
        q: &SparseMatrix<f64>,
        coeffs: &[(Complex64, Complex64)],
    ) -> Result<Self, LinalgError> {
        let border = wrap_border(&[p, q]);
        let pc = p.map(|v| Complex64::new(v, 0.0));
        let qc = q.map(|v| Complex64::new(v, 0.0));
        let factors = coeffs
            .iter()
            .map(|&(cp, cq)| AlmostBandedLu::new(&pc.combine(cp, &qc, cq), border))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { factors })
    }

    pub fn solve_in_place(&self, m: usize, rhs: &mut [Complex64]) {
        self.factors[m].solve_in_place(rhs);
    }
}
