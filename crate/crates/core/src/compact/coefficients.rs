//! Interior and boundary coefficients of the compact (Padé) stencils, in
//! exact rational arithmetic.
//!
//! Interior families, written for the k-th derivative with `alpha` the
//! weight of the neighbouring derivative values:
//!
//! ```text
//! k=1: α(f'ᵢ₋₁ + f'ᵢ₊₁) + f'ᵢ = a (fᵢ₊₁ - fᵢ₋₁)/2h + b (fᵢ₊₂ - fᵢ₋₂)/4h
//! k=2: α(f''ᵢ₋₁ + f''ᵢ₊₁) + f''ᵢ = a (fᵢ₊₁ - 2fᵢ + fᵢ₋₁)/h² + b (fᵢ₊₂ - 2fᵢ + fᵢ₋₂)/4h²
//! k=3: α(f'''ᵢ₋₁ + f'''ᵢ₊₁) + f'''ᵢ = a (fᵢ₊₂ - fᵢ₋₂ - 2(fᵢ₊₁ - fᵢ₋₁))/2h³
//!                                   + b (fᵢ₊₃ - fᵢ₋₃ - 3(fᵢ₊₁ - fᵢ₋₁))/8h³
//! ```

use num_rational::Rational64;
use num_traits::{One, Zero};

use super::CompactError;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn int(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientSet {
    pub derivative_order: u32,
    pub accuracy_order: u32,
    pub alpha: Rational64,
    pub a: Rational64,
    pub b: Rational64,
}

/// One row `c_α·α + c_a·a + c_b·b = rhs` of the Taylor order conditions.
type Condition = ([Rational64; 3], Rational64);

fn order_conditions(derivative_order: u32, accuracy_order: u32) -> Vec<Condition> {
    // consistency: 1 + 2α = a + b
    let mut rows = vec![([int(2), int(-1), int(-1)], int(-1))];
    for l in 1..accuracy_order / 2 {
        let lhs = r(2, factorial(2 * l));
        let row = match derivative_order {
            // 2α/(2l)! = (a + 4ˡ b)/(2l+1)!
            1 => {
                let d = factorial(2 * l + 1);
                [lhs, r(-1, d), r(-(4i64.pow(l)), d)]
            }
            // 2α/(2l)! = 2(4ˡ b + a)/(2l+2)!
            2 => {
                let d = factorial(2 * l + 2);
                [lhs, r(-2, d), r(-2 * 4i64.pow(l), d)]
            }
            // 2α/(2l)! = [2a(2^{2(l+1)} - 1) + (3/4) b (3^{2(l+1)} - 1)] / (2l+3)!
            3 => {
                let d = factorial(2 * l + 3);
                let ca = int(2 * (4i64.pow(l + 1) - 1));
                let cb = r(3, 4) * int(9i64.pow(l + 1) - 1);
                [lhs, -ca / int(d), -cb / int(d)]
            }
            _ => unreachable!(),
        };
        rows.push((row, Rational64::zero()));
    }
    rows
}

impl CoefficientSet {
    /// Residuals of every order condition up to `accuracy_order`; all exactly
    /// zero for a valid set.
    pub fn order_condition_residuals(&self) -> Vec<Rational64> {
        order_conditions(self.derivative_order, self.accuracy_order)
            .into_iter()
            .map(|(c, rhs)| c[0] * self.alpha + c[1] * self.a + c[2] * self.b - rhs)
            .collect()
    }

    /// Half-width of the right-hand side stencil.
    pub fn rhs_half_width(&self) -> usize {
        let base = if self.derivative_order == 3 { 2 } else { 1 };
        if self.b.is_zero() {
            base
        } else {
            base + 1
        }
    }

    /// `(offset, weight)` pairs of the left-hand side (derivative values).
    pub fn lhs_stencil(&self) -> Vec<(isize, Rational64)> {
        if self.alpha.is_zero() {
            vec![(0, Rational64::one())]
        } else {
            vec![(-1, self.alpha), (0, Rational64::one()), (1, self.alpha)]
        }
    }

    /// `(offset, weight)` pairs of the right-hand side, in units of `h^-k`.
    pub fn rhs_stencil(&self) -> Vec<(isize, Rational64)> {
        let (a, b) = (self.a, self.b);
        let mut s: Vec<(isize, Rational64)> = match self.derivative_order {
            1 => vec![(-2, -b / 4), (-1, -a / 2), (1, a / 2), (2, b / 4)],
            2 => vec![
                (-2, b / 4),
                (-1, a),
                (0, -a * 2 - b / 2),
                (1, a),
                (2, b / 4),
            ],
            3 => {
                let c1 = a + b * r(3, 8);
                vec![
                    (-3, -b / 8),
                    (-2, -a / 2),
                    (-1, c1),
                    (1, -c1),
                    (2, a / 2),
                    (3, b / 8),
                ]
            }
            _ => unreachable!(),
        };
        s.retain(|(_, w)| !w.is_zero());
        s
    }
}

/// Solve a small square system over the rationals; `None` if singular.
pub(crate) fn solve_rational(mut m: Vec<Vec<Rational64>>, mut rhs: Vec<Rational64>) -> Option<Vec<Rational64>> {
    let n = rhs.len();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, p);
        rhs.swap(k, p);
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    let v = m[k][j];
                    m[i][j] -= f * v;
                }
                let v = rhs[k];
                rhs[i] -= f * v;
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Coefficients of the interior compact scheme.
///
/// Order 6 determines `(α, a, b)` uniquely. The lower orders leave free
/// parameters, fixed as follows: order 2 takes `α = b = 0`; order 4 takes
/// `b = 0` for the first and second derivatives and `α = 0` for the third
/// (its `b = 0` member has `α = 1/2`, which makes the periodic left-hand
/// matrix singular at the Nyquist mode).
pub fn interior_coefficients(derivative_order: u32, accuracy_order: u32) -> Result<CoefficientSet, CompactError> {
    if !(1..=3).contains(&derivative_order) || ![2, 4, 6].contains(&accuracy_order) {
        return Err(CompactError::UnsupportedOrder {
            derivative_order,
            accuracy_order,
        });
    }
    let mut rows = order_conditions(derivative_order, accuracy_order);
    let fix_alpha = ([int(1), int(0), int(0)], int(0));
    let fix_b = ([int(0), int(0), int(1)], int(0));
    match (derivative_order, accuracy_order) {
        (_, 2) => rows.extend([fix_alpha, fix_b]),
        (3, 4) => rows.push(fix_alpha),
        (_, 4) => rows.push(fix_b),
        _ => {}
    }
    let (m, rhs): (Vec<Vec<Rational64>>, Vec<Rational64>) = rows.into_iter().map(|(c, v)| (c.to_vec(), v)).unzip();
    let sol = solve_rational(m, rhs).expect("order conditions are nonsingular");
    Ok(CoefficientSet {
        derivative_order,
        accuracy_order,
        alpha: sol[0],
        a: sol[1],
        b: sol[2],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgePosition {
    LeftEdge,
    RightEdge,
}

/// One-sided first-derivative closure
/// `f'₀ + α f'₁ = (c₀ f₀ + c₁ f₁ + … )/h` at the left edge; the right edge
/// is its mirror image with negated right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryClosure {
    pub position: EdgePosition,
    /// Weights of `f'₀, f'₁` (the first is always one).
    pub lhs_coeffs: Vec<Rational64>,
    /// Weights of `f₀, f₁, …`, in units of `1/h`.
    pub rhs_coeffs: Vec<Rational64>,
    pub accuracy_order: u32,
}

impl BoundaryClosure {
    pub fn alpha(&self) -> Rational64 {
        self.lhs_coeffs.get(1).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn mirrored(&self) -> Self {
        let position = match self.position {
            EdgePosition::LeftEdge => EdgePosition::RightEdge,
            EdgePosition::RightEdge => EdgePosition::LeftEdge,
        };
        Self {
            position,
            lhs_coeffs: self.lhs_coeffs.clone(),
            rhs_coeffs: self.rhs_coeffs.iter().map(|&c| -c).collect(),
            accuracy_order: self.accuracy_order,
        }
    }
}

/// Solve the Taylor moment system for a left-edge closure using
/// `stencil_points` function values.
///
/// With `stencil_points == accuracy_order` the derivative neighbour weight
/// `α` is an unknown; with one more point the closure is explicit.
pub fn boundary_closure(
    derivative_order: u32,
    accuracy_order: u32,
    stencil_points: usize,
) -> Result<BoundaryClosure, CompactError> {
    if derivative_order != 1 || accuracy_order == 0 {
        return Err(CompactError::UnsupportedOrder {
            derivative_order,
            accuracy_order,
        });
    }
    let p = accuracy_order as usize;
    if stencil_points < p {
        return Err(CompactError::UnderdeterminedStencil {
            stencil_points,
            accuracy_order,
        });
    }
    if stencil_points > p + 1 {
        return Err(CompactError::InvalidStencil {
            stencil_points,
            accuracy_order,
        });
    }
    let implicit = stencil_points == p;
    let unknowns = stencil_points + usize::from(implicit);
    // match x^j for j = 0..=p at the edge node, h = 1
    let mut m = Vec::with_capacity(p + 1);
    let mut rhs = Vec::with_capacity(p + 1);
    for j in 0..=p as u32 {
        let mut row: Vec<Rational64> = (0..stencil_points).map(|i| int((i as i64).pow(j))).collect();
        if implicit {
            // α f'(1) moved to the right-hand side: -α j
            row.push(int(-(j as i64)));
        }
        debug_assert_eq!(row.len(), unknowns);
        m.push(row);
        rhs.push(if j == 1 { int(1) } else { int(0) });
    }
    let sol = solve_rational(m, rhs).ok_or(CompactError::UnderdeterminedStencil {
        stencil_points,
        accuracy_order,
    })?;
    let alpha = if implicit { sol[stencil_points] } else { Rational64::zero() };
    let mut lhs_coeffs = vec![Rational64::one()];
    if implicit {
        lhs_coeffs.push(alpha);
    }
    Ok(BoundaryClosure {
        position: EdgePosition::LeftEdge,
        lhs_coeffs,
        rhs_coeffs: sol[..stencil_points].to_vec(),
        accuracy_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn first_derivative_sixth_order() {
        let c = interior_coefficients(1, 6).unwrap();
        assert_eq!((c.alpha, c.a, c.b), (r(1, 3), r(14, 9), r(1, 9)));
    }

    #[test]
    fn first_derivative_low_orders() {
        let c = interior_coefficients(1, 2).unwrap();
        assert_eq!((c.alpha, c.a, c.b), (int(0), int(1), int(0)));
        let c = interior_coefficients(1, 4).unwrap();
        assert_eq!((c.alpha, c.a, c.b), (r(1, 4), r(3, 2), int(0)));
    }

    #[test]
    fn second_and_third_derivative_sixth_order() {
        // frozen from an independent exact solve of the order conditions
        let c = interior_coefficients(2, 6).unwrap();
        assert_eq!((c.alpha, c.a, c.b), (r(2, 11), r(12, 11), r(3, 11)));
        let c = interior_coefficients(3, 6).unwrap();
        assert_eq!((c.alpha, c.a, c.b), (r(7, 16), int(2), r(-1, 8)));
    }

    #[test]
    fn fourth_order_members() {
        let c = interior_coefficients(2, 4).unwrap();
        assert_eq!((c.alpha, c.a, c.b), (r(1, 10), r(6, 5), int(0)));
        let c = interior_coefficients(3, 4).unwrap();
        assert_eq!((c.alpha, c.a, c.b), (int(0), int(2), int(-1)));
    }

    #[test]
    fn residuals_vanish_and_alpha_is_dominated() {
        for k in 1..=3 {
            for m in [2, 4, 6] {
                let c = interior_coefficients(k, m).unwrap();
                assert!(c.order_condition_residuals().iter().all(|v| v.is_zero()), "({k},{m})");
                assert!(c.alpha.abs() < r(1, 2), "({k},{m})");
                // stencil annihilates constants
                let sum: Rational64 = c.rhs_stencil().iter().map(|&(_, w)| w).sum();
                assert!(sum.is_zero());
            }
        }
    }

    #[test]
    fn unsupported_pairs() {
        assert!(interior_coefficients(4, 6).is_err());
        assert!(interior_coefficients(1, 8).is_err());
        assert!(interior_coefficients(0, 2).is_err());
    }

    #[test]
    fn fourth_order_closure() {
        let c = boundary_closure(1, 4, 4).unwrap();
        assert_eq!(c.alpha(), int(3));
        assert_eq!(c.rhs_coeffs, vec![r(-17, 6), r(3, 2), r(3, 2), r(-1, 6)]);
        assert!(c.rhs_coeffs.iter().sum::<Rational64>().is_zero());
    }

    #[test]
    fn forward_difference_closure() {
        let c = boundary_closure(1, 1, 2).unwrap();
        assert_eq!(c.alpha(), int(0));
        assert_eq!(c.rhs_coeffs, vec![int(-1), int(1)]);
        let c = boundary_closure(1, 2, 3).unwrap();
        assert_eq!(c.rhs_coeffs, vec![r(-3, 2), int(2), r(-1, 2)]);
    }

    #[test]
    fn closure_errors() {
        assert!(matches!(
            boundary_closure(1, 4, 3),
            Err(CompactError::UnderdeterminedStencil { .. })
        ));
        assert!(boundary_closure(2, 4, 4).is_err());
        let right = boundary_closure(1, 4, 4).unwrap().mirrored();
        assert_eq!(right.position, EdgePosition::RightEdge);
        assert_eq!(right.rhs_coeffs[0], r(17, 6));
    }
}
