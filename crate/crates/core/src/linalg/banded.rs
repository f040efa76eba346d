//! Banded LU with partial pivoting.
//!
//! Storage follows the LAPACK `gbtrf` layout transposed to rows: row `i`
//! holds columns `i - kl ..= i + ku + kl`, the extra `kl` super-diagonals
//! receiving fill-in from row interchanges.

use super::scalar::Scalar;
use super::LinalgError;

#[derive(Debug, Clone)]
pub struct BandedMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandedMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![T::zero(); n * width],
        }
    }

    /// Build from triplets; the bandwidths are taken from the entries.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, T)]) -> Self {
        let kl = triplets.iter().map(|&(i, j, _)| i.saturating_sub(j)).max().unwrap_or(0);
        let ku = triplets.iter().map(|&(i, j, _)| j.saturating_sub(i)).max().unwrap_or(0);
        let mut m = Self::zeros(n, kl, ku);
        for &(i, j, v) in triplets {
            *m.at_mut(i, j) += v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.data[self.offset(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        let o = self.offset(i, j);
        &mut self.data[o]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if j + self.kl < i || j > i + self.ku {
            T::zero()
        } else {
            self.at(i, j)
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).fold(T::zero(), |acc, j| acc + self.at(i, j) * x[j])
            })
            .collect()
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    lu: BandedMatrix<T>,
    piv: Vec<usize>,
}

impl<T: Scalar> BandedLu<T> {
    pub fn new(a: &BandedMatrix<T>) -> Result<Self, LinalgError> {
        let mut lu = a.clone();
        let n = lu.n;
        let (kl, ku) = (lu.kl, lu.ku);
        let tiny = 1e-14 * lu.max_abs();
        let mut piv = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut pmax = lu.at(k, k).modulus();
            for i in k + 1..=last_row {
                let m = lu.at(i, k).modulus();
                if m > pmax {
                    p = i;
                    pmax = m;
                }
            }
            if pmax <= tiny || pmax == 0.0 {
                return Err(LinalgError::SingularMatrix { pivot: k });
            }
            piv[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (lu.offset(k, j), lu.offset(p, j));
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.at(k, k);
            for i in k + 1..=last_row {
                let l = lu.at(i, k) / pivot;
                *lu.at_mut(i, k) = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = lu.at(k, j);
                    *lu.at_mut(i, j) -= l * u;
                }
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.lu.n;
        let (kl, ku) = (self.lu.kl, self.lu.ku);
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.lu.at(i, k) * bk;
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..=(i + kl + ku).min(n - 1) {
                acc -= self.lu.at(i, j) * b[j];
            }
            b[i] = acc / self.lu.at(i, i);
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
