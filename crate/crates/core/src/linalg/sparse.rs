//! Coordinate-list matrices used to describe the compact operators before
//! they are factorized.

use super::dense::DenseMatrix;
use super::scalar::Scalar;

/// Square sparse matrix stored as compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    n: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Assemble from `(row, col, value)` triplets. Duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside {n}x{n}");
            match rows[i].iter_mut().find(|(c, _)| *c == j) {
                Some((_, acc)) => *acc += v,
                None => rows[i].push((j, v)),
            }
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for mut row in rows {
            row.sort_by_key(|(c, _)| *c);
            for (c, v) in row {
                if v != T::zero() {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            n,
            row_start,
            cols,
            vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, T::one())))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.row(i)
            .find(|(c, _)| *c == j)
            .map(|(_, v)| v)
            .unwrap_or_else(T::zero)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// `y = A x`.
    pub fn matvec_into<U>(&self, x: &[U], y: &mut [U])
    where
        U: Copy + num_traits::Zero + std::ops::Mul<T, Output = U>,
    {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = U::zero();
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc = acc + x[self.cols[k]] * self.vals[k];
            }
            *yi = acc;
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// Copy with row `i` replaced by the given entries.
    pub fn with_row_replaced(&self, i: usize, entries: impl IntoIterator<Item = (usize, T)>) -> Self {
        let kept = self.triplets().filter(|&(r, _, _)| r != i);
        let new = entries.into_iter().map(|(j, v)| (i, j, v));
        Self::from_triplets(self.n, kept.chain(new).collect::<Vec<_>>())
    }

    /// Sum of each column.
    pub fn column_sums(&self) -> Vec<T> {
        let mut s = vec![T::zero(); self.n];
        for (_, j, v) in self.triplets() {
            s[j] += v;
        }
        s
    }

    /// Linear combination `a*self + b*other`.
    pub fn combine(&self, a: T, other: &SparseMatrix<T>, b: T) -> Self {
        assert_eq!(self.n, other.n);
        let t = self
            .triplets()
            .map(|(i, j, v)| (i, j, v * a))
            .chain(other.triplets().map(|(i, j, v)| (i, j, v * b)))
            .collect::<Vec<_>>();
        Self::from_triplets(self.n, t)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            n: self.n,
            row_start: self.row_start.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = SparseMatrix::from_triplets(2, [(0, 0, 1.0), (0, 0, 2.0), (1, 0, -1.0), (1, 0, 1.0)]);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn row_replacement() {
        let m = SparseMatrix::<f64>::identity(3).with_row_replaced(2, (0..3).map(|j| (j, 1.0)));
        assert_eq!(m.matvec(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 6.0]);
        assert_eq!(m.column_sums(), vec![2.0, 2.0, 1.0]);
    }
}
