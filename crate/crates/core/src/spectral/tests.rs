use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn grid(n: usize) -> (Vec<f64>, f64) {
    let period = 2.0 * PI;
    let h = period / n as f64;
    ((0..n).map(|i| -PI + i as f64 * h).collect(), period)
}

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn wavenumbers_at_unit_scale() {
    let w = wavenumbers(4, 2.0 * PI).unwrap();
    assert_eq!(w.values(), &[0.0, 1.0, -2.0, -1.0]);
    let w = wavenumbers(8, 2.0 * PI).unwrap();
    assert_eq!(w.values(), &[0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    let w = wavenumbers(200, 42.0).unwrap();
    assert_eq!(w.values()[0], 0.0);
    for k in 1..100 {
        assert_eq!(w.values()[k], -w.values()[200 - k]);
    }
}

#[test]
fn wavenumber_errors() {
    assert_eq!(wavenumbers(7, 1.0), Err(SpectralError::UnsupportedSize { n_modes: 7 }));
    assert_eq!(wavenumbers(0, 1.0), Err(SpectralError::UnsupportedSize { n_modes: 0 }));
    assert!(matches!(wavenumbers(8, -1.0), Err(SpectralError::InvalidPeriod { .. })));
}

#[test]
fn inverse_grid_zeroes_unmatched_modes() {
    let w = wavenumbers(8, 2.0 * PI).unwrap();
    let inv = InverseWavenumberGrid::new(&w);
    assert_eq!(inv.values()[0], 0.0);
    assert_eq!(inv.values()[4], 0.0);
    assert_eq!(inv.values()[1], 1.0);
    assert_eq!(inv.values()[7], -1.0);
}

#[test]
fn derivatives_are_exact_on_trig_polynomials() {
    for n in [16, 64, 100] {
        let (xs, period) = grid(n);
        let w = wavenumbers(n, period).unwrap();
        let f: Vec<f64> = xs.iter().map(|&x| (3.0 * x).sin()).collect();
        let d1: Vec<f64> = xs.iter().map(|&x| 3.0 * (3.0 * x).cos()).collect();
        let d3: Vec<f64> = xs.iter().map(|&x| -27.0 * (3.0 * x).cos()).collect();
        assert!(max_err(&spectral_derivative(&f, &w, 1).unwrap(), &d1) < 1e-12 * 3.0);
        // round-off in the top modes is amplified by k^3
        let tol3 = 1e-15 * (n as f64 / 2.0).powi(3);
        assert!(max_err(&spectral_derivative(&f, &w, 3).unwrap(), &d3) < tol3.max(1e-12) * 27.0);
        let s: Vec<f64> = xs.iter().map(|&x| x.sin()).collect();
        let c: Vec<f64> = xs.iter().map(|&x| -x.cos()).collect();
        assert!(max_err(&spectral_derivative(&s, &w, 3).unwrap(), &c) < tol3.max(1e-12));
    }
}

#[test]
fn constants_have_zero_derivatives() {
    let w = wavenumbers(32, 5.0).unwrap();
    for order in 1..=3 {
        let out = spectral_derivative(&[2.5; 32], &w, order).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-12));
    }
}

#[test]
fn dimension_mismatch() {
    let w = wavenumbers(32, 5.0).unwrap();
    assert!(matches!(
        spectral_derivative(&[0.0; 31], &w, 1),
        Err(SpectralError::DimensionMismatch { expected: 32, got: 31 })
    ));
    let inv = InverseWavenumberGrid::new(&w);
    assert!(spectral_antiderivative(&[0.0; 30], &inv).is_err());
}

#[test]
fn antiderivative_of_cosine_and_zero() {
    let (xs, period) = grid(64);
    let w = wavenumbers(64, period).unwrap();
    let inv = InverseWavenumberGrid::new(&w);
    let f: Vec<f64> = xs.iter().map(|&x| (2.0 * x).cos()).collect();
    let expected: Vec<f64> = xs.iter().map(|&x| (2.0 * x).sin() / 2.0).collect();
    assert!(max_err(&spectral_antiderivative(&f, &inv).unwrap(), &expected) < 1e-12);
    assert!(spectral_antiderivative(&[0.0; 64], &inv).unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn antiderivative_round_trip_on_random_zero_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 128;
    let w = wavenumbers(n, 10.0).unwrap();
    let inv = InverseWavenumberGrid::new(&w);
    // band-limit away from the Nyquist mode, which the odd symbols discard
    let mut f_hat = vec![Complex64::new(0.0, 0.0); n];
    for m in 1..n / 2 {
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        f_hat[m] = c;
        f_hat[n - m] = c.conj();
    }
    let fft = Fft1D::new(n);
    fft.inverse(&mut f_hat);
    let f: Vec<f64> = f_hat.iter().map(|c| c.re).collect();
    let back = spectral_derivative(&spectral_antiderivative(&f, &inv).unwrap(), &w, 1).unwrap();
    assert!(max_err(&back, &f) <= 1e-11);
}

#[test]
fn mass_zero_projection() {
    let ones = vec![Complex64::new(1.0, 0.0); 8];
    let p = project_mass_zero(&ones);
    assert_eq!(p[0], Complex64::new(0.0, 0.0));
    assert!(p[1..].iter().all(|&c| c == Complex64::new(1.0, 0.0)));
    assert_eq!(project_mass_zero(&p), p);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let fft = Fft1D::new(16);
    let mut buf: Vec<Complex64> = (0..16).map(|_| Complex64::new(rng.random_range(0.0..1.0), 0.0)).collect();
    fft.forward(&mut buf);
    let mut proj = project_mass_zero(&buf);
    fft.inverse(&mut proj);
    assert!(proj.iter().map(|c| c.re).sum::<f64>().abs() < 1e-12);
}

#[test]
fn row_transform_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (nx, ny) in [(8, 3), (9, 4), (601, 2)] {
        let t = RowTransform::new(nx, ny);
        let v: Vec<f64> = (0..nx * ny).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut spec = vec![Complex64::new(0.0, 0.0); t.spectrum_len()];
        t.forward(&v, &mut spec);
        // mode 0 of row j is the row sum
        let s1: f64 = v[nx..2 * nx].iter().sum();
        assert!((spec[1].re - s1).abs() < 1e-12);
        let mut back = vec![0.0; nx * ny];
        t.inverse(&spec, &mut back);
        assert!(max_err(&back, &v) < 1e-13);
    }
}

proptest! {
    #[test]
    fn parseval(values in prop::collection::vec(-10.0f64..10.0, 32)) {
        let fft = Fft1D::new(32);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut buf);
        let lhs: f64 = values.iter().map(|v| v * v).sum();
        let rhs: f64 = buf.iter().map(|c| c.norm_sqr()).sum::<f64>() / 32.0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn first_derivative_symbol_is_antisymmetric(n in (1usize..40).prop_map(|k| 2 * k), period in 0.1f64..100.0) {
        let w = wavenumbers(n, period).unwrap();
        let s = w.derivative_symbol(1);
        for m in 1..n {
            prop_assert_eq!(s[m], -s[n - m]);
        }
    }

    #[test]
    fn projection_is_idempotent(re in prop::collection::vec(-1.0f64..1.0, 1..20)) {
        let v: Vec<Complex64> = re.iter().map(|&r| Complex64::new(r, -r)).collect();
        let once = project_mass_zero(&v);
        prop_assert_eq!(project_mass_zero(&once), once);
    }
}
