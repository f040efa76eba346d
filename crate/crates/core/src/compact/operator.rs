use num_rational::Rational64;
use num_traits::ToPrimitive;

use super::coefficients::{boundary_closure, interior_coefficients, BoundaryClosure, CoefficientSet};
use super::CompactError;
use crate::linalg::{AlmostBandedLu, SparseMatrix};

/// Symmetry of the sampled function about a reflecting boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// `f(-y) = f(y)`: homogeneous Neumann.
    Even,
    /// `f(-y) = -f(y)`: homogeneous Dirichlet.
    Odd,
}

impl Parity {
    fn sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

/// Boundary treatment of a 1D compact operator.
///
/// `Periodic` grids are node-centred, `x_i = x_0 + i h`. `Reflect` grids are
/// cell-centred: the wall sits half a cell outside the first and last nodes
/// and ghost values are mirror images with the given parity, which keeps the
/// interior stencil (and its order) right up to the wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcKind {
    Periodic,
    OneSided,
    Reflect(Parity),
}

fn to_f64(r: Rational64) -> f64 {
    r.to_f64().expect("rational coefficient fits in f64")
}

/// Where a (possibly out-of-range) stencil index lands, with a sign.
fn resolve(i: isize, n: usize, bc: BcKind, parity_sign: i64) -> (usize, i64) {
    let n_i = n as isize;
    match bc {
        BcKind::Periodic => (i.rem_euclid(n_i) as usize, 1),
        BcKind::Reflect(_) => {
            if i < 0 {
                ((-1 - i) as usize, parity_sign)
            } else if i >= n_i {
                ((2 * n_i - 1 - i) as usize, parity_sign)
            } else {
                (i as usize, 1)
            }
        }
        BcKind::OneSided => {
            debug_assert!(i >= 0 && i < n_i);
            (i as usize, 1)
        }
    }
}

/// Discrete k-th derivative `F^(k) = P⁻¹ Q F` on a uniform grid.
#[derive(Debug, Clone)]
pub struct CompactOperator1D {
    n_points: usize,
    h: f64,
    coefficients: CoefficientSet,
    bc: BcKind,
    p: SparseMatrix<f64>,
    q: SparseMatrix<f64>,
    p_factor: Option<AlmostBandedLu<f64>>,
}

impl CompactOperator1D {
    pub fn new(
        n_points: usize,
        h: f64,
        derivative_order: u32,
        accuracy_order: u32,
        bc: BcKind,
    ) -> Result<Self, CompactError> {
        let coefficients = interior_coefficients(derivative_order, accuracy_order)?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(CompactError::InvalidSpacing { h });
        }
        let width = coefficients.rhs_half_width();
        let min = match bc {
            BcKind::Periodic => 2 * width + 1,
            BcKind::Reflect(_) => width + 1,
            BcKind::OneSided => (2 * width + 1).max(5),
        };
        if n_points < min {
            return Err(CompactError::GridTooSmall { n_points, min });
        }
        let (p, q) = match bc {
            BcKind::Periodic | BcKind::Reflect(_) => Self::wrapped_matrices(n_points, h, &coefficients, bc),
            BcKind::OneSided => Self::one_sided_matrices(n_points, h, &coefficients)?,
        };
        let p_factor = if is_identity(&p) {
            None
        } else {
            let border = if bc == BcKind::Periodic { 1 } else { 0 };
            Some(AlmostBandedLu::new(&p, border)?)
        };
        Ok(Self {
            n_points,
            h,
            coefficients,
            bc,
            p,
            q,
            p_factor,
        })
    }

    fn wrapped_matrices(
        n: usize,
        h: f64,
        c: &CoefficientSet,
        bc: BcKind,
    ) -> (SparseMatrix<f64>, SparseMatrix<f64>) {
        let k = c.derivative_order;
        let parity = match bc {
            BcKind::Reflect(p) => p.sign(),
            _ => 1,
        };
        // the k-th derivative of an even function has parity (-1)^k
        let deriv_parity = parity * if k % 2 == 1 { -1 } else { 1 };
        let scale = h.powi(-(k as i32));
        let lhs = c.lhs_stencil();
        let rhs = c.rhs_stencil();
        let mut pt = Vec::new();
        let mut qt = Vec::new();
        for i in 0..n {
            for &(off, w) in &lhs {
                let (j, s) = resolve(i as isize + off, n, bc, deriv_parity);
                pt.push((i, j, s as f64 * to_f64(w)));
            }
            for &(off, w) in &rhs {
                let (j, s) = resolve(i as isize + off, n, bc, parity);
                qt.push((i, j, s as f64 * to_f64(w) * scale));
            }
        }
        (SparseMatrix::from_triplets(n, pt), SparseMatrix::from_triplets(n, qt))
    }

    /// First derivative with one-sided closures of order `min(m, 4)` on the
    /// edge rows; for order 6 the next rows use the fourth-order Padé
    /// stencil since the interior one reaches past the edge.
    fn one_sided_matrices(
        n: usize,
        h: f64,
        c: &CoefficientSet,
    ) -> Result<(SparseMatrix<f64>, SparseMatrix<f64>), CompactError> {
        if c.derivative_order != 1 {
            return Err(CompactError::UnsupportedBoundary {
                derivative_order: c.derivative_order,
            });
        }
        let edge_order = c.accuracy_order.min(4);
        let closure: BoundaryClosure = if edge_order == 4 {
            boundary_closure(1, 4, 4)?
        } else {
            boundary_closure(1, edge_order, edge_order as usize + 1)?
        };
        let near = if c.rhs_half_width() > 1 {
            Some(interior_coefficients(1, 4)?)
        } else {
            None
        };
        let inv_h = 1.0 / h;
        let mut pt = Vec::new();
        let mut qt = Vec::new();
        let push_interior = |i: usize, cs: &CoefficientSet, pt: &mut Vec<_>, qt: &mut Vec<_>| {
            for (off, w) in cs.lhs_stencil() {
                pt.push((i, (i as isize + off) as usize, to_f64(w)));
            }
            for (off, w) in cs.rhs_stencil() {
                qt.push((i, (i as isize + off) as usize, to_f64(w) * inv_h));
            }
        };
        for i in 0..n {
            if i == 0 || i == n - 1 {
                let (dir, base): (isize, isize) = if i == 0 { (1, 0) } else { (-1, (n - 1) as isize) };
                let sign = if i == 0 { 1.0 } else { -1.0 };
                for (t, &w) in closure.lhs_coeffs.iter().enumerate() {
                    pt.push((i, (base + dir * t as isize) as usize, to_f64(w)));
                }
                for (t, &w) in closure.rhs_coeffs.iter().enumerate() {
                    qt.push((i, (base + dir * t as isize) as usize, sign * to_f64(w) * inv_h));
                }
            } else if (i == 1 || i == n - 2) && near.is_some() {
                push_interior(i, near.as_ref().unwrap(), &mut pt, &mut qt);
            } else {
                push_interior(i, c, &mut pt, &mut qt);
            }
        }
        Ok((SparseMatrix::from_triplets(n, pt), SparseMatrix::from_triplets(n, qt)))
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn derivative_order(&self) -> u32 {
        self.coefficients.derivative_order
    }

    pub fn accuracy_order(&self) -> u32 {
        self.coefficients.accuracy_order
    }

    pub fn coefficients(&self) -> &CoefficientSet {
        &self.coefficients
    }

    pub fn bc(&self) -> BcKind {
        self.bc
    }

    /// Left-hand (derivative) matrix.
    pub fn p(&self) -> &SparseMatrix<f64> {
        &self.p
    }

    /// Right-hand (function value) matrix, scaled by `h^-k`.
    pub fn q(&self) -> &SparseMatrix<f64> {
        &self.q
    }

    /// `out = P⁻¹ Q f`.
    pub fn apply_into(&self, f: &[f64], out: &mut [f64]) -> Result<(), CompactError> {
        if f.len() != self.n_points || out.len() != self.n_points {
            return Err(CompactError::DimensionMismatch {
                expected: self.n_points,
                got: f.len().min(out.len()),
            });
        }
        self.q.matvec_into(f, out);
        if let Some(lu) = &self.p_factor {
            lu.solve_in_place(out);
        }
        Ok(())
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>, CompactError> {
        let mut out = vec![0.0; self.n_points];
        self.apply_into(f, &mut out)?;
        Ok(out)
    }

    /// Solve with the factorized left-hand matrix only.
    pub fn solve_p_in_place(&self, v: &mut [f64]) {
        if let Some(lu) = &self.p_factor {
            lu.solve_in_place(v);
        }
    }
}

fn is_identity(m: &SparseMatrix<f64>) -> bool {
    m.triplets().all(|(i, j, v)| i == j && v == 1.0) && m.nnz() == m.dim()
}

/// Build a compact derivative operator.
pub fn build_operator(
    n_points: usize,
    h: f64,
    derivative_order: u32,
    accuracy_order: u32,
    bc: BcKind,
) -> Result<CompactOperator1D, CompactError> {
    CompactOperator1D::new(n_points, h, derivative_order, accuracy_order, bc)
}
