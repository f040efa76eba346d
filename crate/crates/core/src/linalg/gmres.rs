//! Restarted GMRES with right preconditioning.
//!
//! Right preconditioning keeps the monitored residual equal to the true
//! residual `b - A x`, which is what the convergence test is stated in.

use super::LinalgError;

/// Matrix-free linear operator on real vectors.
pub trait LinearMap {
    fn dim(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl<F: Fn(&[f64], &mut [f64])> LinearMap for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.1)(x, y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityMap(pub usize);

impl LinearMap for IdentityMap {
    fn dim(&self) -> usize {
        self.0
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

/// Inverse-diagonal (Jacobi) preconditioner.
#[derive(Debug, Clone)]
pub struct DiagonalPreconditioner {
    inv: Vec<f64>,
}

impl DiagonalPreconditioner {
    /// Entries with magnitude below `1e-14` are replaced by one.
    pub fn new(diagonal: &[f64]) -> Self {
        let inv = diagonal
            .iter()
            .map(|&d| if d.abs() < 1e-14 { 1.0 } else { 1.0 / d })
            .collect();
        Self { inv }
    }
}

impl LinearMap for DiagonalPreconditioner {
    fn dim(&self) -> usize {
        self.inv.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, xi), di) in y.iter_mut().zip(x).zip(&self.inv) {
            *yi = xi * di;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresParams {
    pub rel_tol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for GmresParams {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: 500,
            restart: 60,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_relative_residual: f64,
    pub converged: bool,
    /// Relative residual after each inner iteration, starting with the
    /// initial guess.
    pub residual_history: Vec<f64>,
}

// Sequential reduction so results are bit-reproducible.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `A x = b`. `x0` defaults to zero.
pub fn gmres(
    a: &dyn LinearMap,
    precond: &dyn LinearMap,
    b: &[f64],
    x0: Option<&[f64]>,
    params: &GmresParams,
) -> Result<(Vec<f64>, SolveReport), LinalgError> {
    let n = a.dim();
    if b.len() != n || precond.dim() != n || x0.is_some_and(|x| x.len() != n) {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    assert!(params.rel_tol > 0.0 && params.restart >= 1);

    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut report = SolveReport::default();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        report.converged = true;
        report.residual_history.push(0.0);
        return Ok((x, report));
    }

    let m = params.restart;
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut h = vec![vec![0.0; m]; m + 1];
    let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
    let mut g = vec![0.0; m + 1];

    let residual = |x: &[f64], r: &mut [f64], w: &mut [f64]| {
        a.apply(x, w);
        for ((ri, bi), wi) in r.iter_mut().zip(b).zip(w.iter()) {
            *ri = bi - wi;
        }
        norm(r)
    };

    let mut beta = residual(&x, &mut r, &mut w);
    report.final_relative_residual = beta / bnorm;
    report.residual_history.push(beta / bnorm);
    if beta <= params.rel_tol * bnorm {
        report.converged = true;
        return Ok((x, report));
    }

    while report.iterations < params.max_iter {
        basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;
        let mut k_used = 0;

        for j in 0..m {
            if report.iterations >= params.max_iter {
                break;
            }
            report.iterations += 1;
            precond.apply(&basis[j], &mut z);
            a.apply(&z, &mut w);
            // modified Gram-Schmidt
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
            let hnext = norm(&w);
            h[j + 1][j] = hnext;
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(h[j + 1][j]);
            if denom == 0.0 {
                return Err(LinalgError::Breakdown { iteration: report.iterations });
            }
            cs[j] = h[j][j] / denom;
            sn[j] = h[j + 1][j] / denom;
            h[j][j] = denom;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            k_used = j + 1;
            let rel = g[j + 1].abs() / bnorm;
            report.residual_history.push(rel);
            if rel <= params.rel_tol {
                break;
            }
            // lucky breakdown: the Krylov space holds the solution
            if hnext <= 1e-14 * bnorm {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }

        // back substitution for the least-squares coefficients
        let mut yk = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s = (i + 1..k_used).fold(g[i], |acc, l| acc - h[i][l] * yk[l]);
            yk[i] = s / h[i][i];
        }
        w.iter_mut().for_each(|v| *v = 0.0);
        for (yi, v) in yk.iter().zip(&basis) {
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk += yi * vk;
            }
        }
        precond.apply(&w, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }

        beta = residual(&x, &mut r, &mut w);
        report.final_relative_residual = beta / bnorm;
        if beta <= params.rel_tol * bnorm {
            report.converged = true;
            return Ok((x, report));
        }
    }
    Err(LinalgError::NoConvergence {
        best: x,
        report: Box::new(report),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diag(Vec<f64>);
    impl LinearMap for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let b: Vec<f64> = (0..10).map(|i| i as f64 - 3.0).collect();
        let (x, rep) = gmres(&IdentityMap(10), &IdentityMap(10), &b, None, &GmresParams::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        for (u, v) in x.iter().zip(&b) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_system() {
        let n = 40;
        let d: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let b = vec![1.0; n];
        let params = GmresParams::default();
        let (x, rep) = gmres(&Diag(d.clone()), &IdentityMap(n), &b, None, &params).unwrap();
        assert!(rep.converged && rep.final_relative_residual <= params.rel_tol);
        for (xi, di) in x.iter().zip(&d) {
            assert!((xi - 1.0 / di).abs() < 1e-9);
        }
        // exact with the Jacobi preconditioner
        let pc = DiagonalPreconditioner::new(&d);
        let (_, rep) = gmres(&Diag(d), &pc, &b, None, &params).unwrap();
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn residual_history_is_monotone() {
        let n = 30;
        let a = (n, |x: &[f64], y: &mut [f64]| {
            let n = x.len();
            for i in 0..n {
                y[i] = 3.0 * x[i] + x[(i + 1) % n] - 0.5 * x[(i + n - 2) % n];
            }
        });
        let b: Vec<f64> = (0..n).map(|i| ((i * 7) % 5) as f64).collect();
        let params = GmresParams {
            restart: 5,
            ..Default::default()
        };
        let (_, rep) = gmres(&a, &IdentityMap(n), &b, None, &params).unwrap();
        for w in rep.residual_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn no_convergence_returns_best_iterate() {
        let n = 50;
        let d: Vec<f64> = (1..=n).map(|i| (i * i) as f64).collect();
        let params = GmresParams {
            rel_tol: 1e-14,
            max_iter: 3,
            restart: 60,
        };
        match gmres(&Diag(d), &IdentityMap(n), &vec![1.0; n], None, &params) {
            Err(LinalgError::NoConvergence { best, report }) => {
                assert_eq!(best.len(), n);
                assert_eq!(report.iterations, 3);
                assert!(!report.converged);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn converged_initial_guess_is_returned_untouched() {
        let b = vec![2.0; 4];
        let x0 = vec![1.0; 4];
        let (x, rep) = gmres(&Diag(vec![2.0; 4]), &IdentityMap(4), &b, Some(&x0), &GmresParams::default()).unwrap();
        assert_eq!(x, x0);
        assert_eq!(rep.iterations, 0);
    }
}
