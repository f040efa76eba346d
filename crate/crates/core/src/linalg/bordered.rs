//! Solver for "almost banded" matrices: a banded leading block bordered by
//! `k` dense trailing rows and columns,
//!
//! ```text
//!     [ B  C ] [x1]   [r1]
//!     [ D  E ] [x2] = [r2]
//! ```
//!
//! Periodic compact operators (wrap-around corners) and the row-replaced
//! antiderivative matrix (one dense row) both fit this shape. The leading
//! block is factorized with banded LU and the border is handled through the
//! `k x k` Schur complement `S = E - D B⁻¹ C`, so a solve costs
//! `O(n (kl + ku + k))`.

use super::banded::{BandedLu, BandedMatrix};
use super::dense::{DenseLu, DenseMatrix};
use super::scalar::Scalar;
use super::sparse::SparseMatrix;
use super::LinalgError;

/// Largest size for which a singular leading block falls back to dense LU.
pub const DENSE_FALLBACK_MAX: usize = 2049;

#[derive(Debug, Clone)]
enum Factor<T> {
    Bordered {
        lead: BandedLu<T>,
        // B⁻¹ C, column-major: k columns of length n - k
        y: Vec<Vec<T>>,
        // dense border rows D, k rows of length n - k
        d: Vec<Vec<T>>,
        schur: Option<DenseLu<T>>,
    },
    Dense(DenseLu<T>),
}

#[derive(Debug, Clone)]
pub struct AlmostBandedLu<T> {
    n: usize,
    border: usize,
    factor: Factor<T>,
}

impl<T: Scalar> AlmostBandedLu<T> {
    /// Factorize `a`, treating its last `border` rows and columns as dense.
    ///
    /// Falls back to dense LU (for `n <= DENSE_FALLBACK_MAX`) if the banded
    /// leading block turns out to be singular.
    pub fn new(a: &SparseMatrix<T>, border: usize) -> Result<Self, LinalgError> {
        let n = a.dim();
        assert!(border <= n);
        match Self::bordered(a, border) {
            Ok(factor) => Ok(Self { n, border, factor }),
            Err(LinalgError::SingularMatrix { .. }) if n <= DENSE_FALLBACK_MAX => {
                let lu = DenseLu::new(&a.to_dense())?;
                Ok(Self {
                    n,
                    border,
                    factor: Factor::Dense(lu),
                })
            }
            Err(e) => Err(e),
        }
    }

    /// Factorize with dense LU regardless of structure.
    pub fn dense(a: &SparseMatrix<T>) -> Result<Self, LinalgError> {
        Ok(Self {
            n: a.dim(),
            border: a.dim(),
            factor: Factor::Dense(DenseLu::new(&a.to_dense())?),
        })
    }

    fn bordered(a: &SparseMatrix<T>, k: usize) -> Result<Factor<T>, LinalgError> {
        let n = a.dim();
        let m = n - k;
        let mut lead_t = Vec::new();
        let mut c = vec![vec![T::zero(); m]; k];
        let mut d = vec![vec![T::zero(); m]; k];
        let mut e = DenseMatrix::zeros(k, k);
        for (i, j, v) in a.triplets() {
            match (i < m, j < m) {
                (true, true) => lead_t.push((i, j, v)),
                (true, false) => c[j - m][i] += v,
                (false, true) => d[i - m][j] += v,
                (false, false) => e[(i - m, j - m)] += v,
            }
        }
        // The leading block must carry the diagonal even where it is zero.
        lead_t.extend((0..m).map(|i| (i, i, T::zero())));
        let lead = if m > 0 {
            BandedLu::new(&BandedMatrix::from_triplets(m, &lead_t))?
        } else {
            BandedLu::new(&BandedMatrix::zeros(0, 0, 0))?
        };
        let y: Vec<Vec<T>> = c
            .into_iter()
            .map(|mut col| {
                lead.solve_in_place(&mut col);
                col
            })
            .collect();
        let schur = if k > 0 {
            let mut s = e;
            for r in 0..k {
                for col in 0..k {
                    let dy = d[r].iter().zip(&y[col]).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
                    s[(r, col)] -= dy;
                }
            }
            // Scale the singularity test by the whole matrix, not the tiny Schur block.
            let mut scale = 0.0f64;
            for (_, _, v) in a.triplets() {
                scale = scale.max(v.modulus());
            }
            let smax = s.max_abs();
            if smax <= 1e-14 * scale {
                return Err(LinalgError::SingularMatrix { pivot: m });
            }
            Some(DenseLu::new(&s)?)
        } else {
            None
        };
        Ok(Factor::Bordered {
            lead,
            y,
            d,
            schur,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn border(&self) -> usize {
        self.border
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.factor, Factor::Dense(_))
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.n);
        match &self.factor {
            Factor::Dense(lu) => lu.solve_in_place(b),
            Factor::Bordered { lead, y, d, schur } => {
                let m = self.n - self.border;
                let (b1, b2) = b.split_at_mut(m);
                lead.solve_in_place(b1);
                if let Some(schur) = schur {
                    for (r, v) in b2.iter_mut().enumerate() {
                        *v = d[r].iter().zip(b1.iter()).fold(*v, |acc, (&dv, &z)| acc - dv * z);
                    }
                    schur.solve_in_place(b2);
                    for (col, &x2) in b2.iter().enumerate() {
                        for (xi, &yi) in b1.iter_mut().zip(&y[col]) {
                            *xi -= x2 * yi;
                        }
                    }
                }
            }
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
