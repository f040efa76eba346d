use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::compact::{build_antiderivative, build_operator};
use crate::linalg::DenseMatrix;

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn grid_geometry() {
    let g = Grid2D::periodic(89.6, 21.0, 601, 160).unwrap();
    assert!((g.hx() - 179.2 / 601.0).abs() < 1e-15);
    assert!((g.x(0) + 89.6 - 0.5 * g.hx()).abs() < 1e-13);
    assert!(g.x(300).abs() < 1e-13);
    assert_eq!(g.y(0), -21.0);
    assert_eq!(g.y(80), 0.0);
    let w = Grid2D::new(1.0, 1.0, 4, 4, BoundaryCondition::Periodic, BoundaryCondition::Neumann0).unwrap();
    assert_eq!(w.y(0), -0.75);
    assert_eq!(w.y(3), 0.75);
    assert!(Grid2D::new(1.0, 1.0, 4, 4, BoundaryCondition::Neumann0, BoundaryCondition::Periodic).is_err());
    assert!(Grid2D::periodic(0.0, 1.0, 4, 4).is_err());
}

#[test]
fn field_rejects_non_finite_values() {
    let g = Grid2D::periodic(1.0, 1.0, 3, 2).unwrap();
    let mut v = vec![0.0; 6];
    v[4] = f64::NAN;
    assert_eq!(Field::new(g, v), Err(FieldError::NonFinite { index: 4 }));
    assert!(Field::new(g, vec![0.0; 5]).is_err());
    let f = Field::from_fn(g, |x, y| x + 10.0 * y).unwrap();
    assert_eq!(f.get(1, 1), g.x(1) + 10.0 * g.y(1));
    assert_eq!(f.row(1)[2], f.values()[5]);
}

#[test]
fn identity_leaves_field_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = Grid2D::periodic(1.0, 2.0, 9, 4).unwrap();
    let f = Field::new(g, random_vec(&mut rng, 36)).unwrap();
    assert_eq!(apply_along_x(&IdentityOperator(9), &f).unwrap(), f);
    assert_eq!(apply_along_y(&IdentityOperator(4), &f).unwrap(), f);
    assert!(matches!(
        apply_along_x(&IdentityOperator(4), &f),
        Err(FieldError::DimensionMismatch { expected: 9, got: 4 })
    ));
}

#[test]
fn along_x_matches_dense_kronecker() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = Grid2D::periodic(1.0, 1.0, 9, 4).unwrap();
    let d = build_operator(9, g.hx(), 3, 6, BcKind::Periodic).unwrap();
    let dense = dense_assemble(&d, &IdentityOperator(4), &g).unwrap();
    let expected = DenseMatrix::<f64>::identity(4).kron(&line_matrix(&d));
    assert!(dense.max_abs_diff(&expected) < 1e-12);
    let f = Field::new(g, random_vec(&mut rng, 36)).unwrap();
    let got = apply_along_x(&d, &f).unwrap();
    let scale = dense.max_abs();
    assert!(max_err(got.values(), &dense.matvec(f.values())) < 1e-12 * scale);
}

#[test]
fn along_y_matches_dense_kronecker() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = Grid2D::new(1.0, 1.0, 4, 9, BoundaryCondition::Periodic, BoundaryCondition::Dirichlet0).unwrap();
    let d = build_operator(9, g.hy(), 2, 4, g.bc_y().bc_kind()).unwrap();
    let dense = dense_assemble(&IdentityOperator(4), &d, &g).unwrap();
    let f = Field::new(g, random_vec(&mut rng, 36)).unwrap();
    let got = apply_along_y(&d, &f).unwrap();
    assert!(max_err(got.values(), &dense.matvec(f.values())) < 1e-12 * dense.max_abs());
}

#[test]
fn constant_field_is_annihilated() {
    let g = Grid2D::periodic(3.0, 2.0, 17, 8).unwrap();
    let f = Field::from_fn(g, |_, _| 4.0).unwrap();
    let dx = build_operator(17, g.hx(), 1, 4, BcKind::Periodic).unwrap();
    let dyy = build_operator(8, g.hy(), 2, 6, BcKind::Periodic).unwrap();
    assert!(apply_along_x(&dx, &f).unwrap().values().iter().all(|v| v.abs() < 1e-12));
    assert!(apply_along_y(&dyy, &f).unwrap().values().iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn row_and_column_applications_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = Grid2D::periodic(2.0, 1.0, 15, 12).unwrap();
    let a = build_antiderivative(15, g.hx(), 6).unwrap();
    let b = build_operator(12, g.hy(), 2, 6, BcKind::Periodic).unwrap();
    let f = Field::new(g, random_vec(&mut rng, g.len())).unwrap();
    let ab = apply_along_y(&b, &apply_along_x(&a, &f).unwrap()).unwrap();
    let ba = apply_along_x(&a, &apply_along_y(&b, &f).unwrap()).unwrap();
    let scale = ab.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    assert!(max_err(ab.values(), ba.values()) < 1e-12 * scale);
}

#[test]
fn dense_assembly_identities() {
    let g = Grid2D::periodic(1.0, 1.0, 5, 3).unwrap();
    let dense = dense_assemble(&IdentityOperator(5), &IdentityOperator(3), &g).unwrap();
    assert_eq!(dense, DenseMatrix::identity(15));

    let a = build_operator(3, g.hy(), 2, 2, BcKind::Periodic).unwrap();
    let b = build_operator(5, g.hx(), 1, 4, BcKind::Periodic).unwrap();
    let left = dense_assemble(&IdentityOperator(5), &a, &g).unwrap();
    let right = dense_assemble(&b, &IdentityOperator(3), &g).unwrap();
    let both = dense_assemble(&b, &a, &g).unwrap();
    assert!(left.matmul(&right).max_abs_diff(&both) < 1e-12 * both.max_abs());

    let big = Grid2D::periodic(1.0, 1.0, 65, 64).unwrap();
    assert_eq!(
        dense_assemble(&IdentityOperator(65), &IdentityOperator(64), &big),
        Err(FieldError::TooLargeForDense { unknowns: 4160 })
    );
}

#[test]
fn matrix_free_matches_dense_on_random_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = Grid2D::new(2.0, 1.5, 33, 24, BoundaryCondition::Periodic, BoundaryCondition::Neumann0).unwrap();
    let ax = build_antiderivative(33, g.hx(), 4).unwrap();
    let by = build_operator(24, g.hy(), 2, 6, g.bc_y().bc_kind()).unwrap();
    let dense = dense_assemble(&ax, &by, &g).unwrap();
    let scale = dense.max_abs();
    for _ in 0..50 {
        let f = Field::new(g, random_vec(&mut rng, g.len())).unwrap();
        let got = apply_along_x(&ax, &apply_along_y(&by, &f).unwrap()).unwrap();
        assert!(max_err(got.values(), &dense.matvec(f.values())) < 1e-12 * scale);
    }
}

proptest! {
    #[test]
    fn applications_are_linear(seed in 0u64..1000, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid2D::periodic(1.0, 1.0, 11, 6).unwrap();
        let d = build_operator(11, g.hx(), 3, 4, BcKind::Periodic).unwrap();
        let u = random_vec(&mut rng, g.len());
        let v = random_vec(&mut rng, g.len());
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
        let apply = |x: &[f64]| apply_along_x(&d, &Field::new(g, x.to_vec()).unwrap()).unwrap().into_values();
        let (au, av, aw) = (apply(&u), apply(&v), apply(&w));
        let combo: Vec<f64> = au.iter().zip(&av).map(|(a, b)| alpha * a + beta * b).collect();
        let scale = combo.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(max_err(&aw, &combo) <= 1e-12 * scale);
    }
}
