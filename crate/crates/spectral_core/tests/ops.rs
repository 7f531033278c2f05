//! Derivative, dealiasing, parity, and symmetry operations.

mod common;

use common::{sample_grid, seeded_samples, TWO_PI};
use num_complex::Complex64;
use spectral_core::{
    conj_reflect, dealias, derivative, enforce_z_parity, forward_transform, inverse_transform,
    Axis, Parity, SpectralScalar, WaveVector,
};

#[test]
fn derivative_of_cosine_is_minus_sine() {
    let n = 8;
    let samples = sample_grid(n, |x1, _, _| (TWO_PI * x1).cos());
    let field = forward_transform(&samples, n).unwrap();
    let ddx = derivative(&field, Axis::X1);
    let values = inverse_transform(&ddx).unwrap();
    let expected = sample_grid(n, |x1, _, _| -TWO_PI * (TWO_PI * x1).sin());
    let worst = values
        .iter()
        .zip(&expected)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(worst <= 1e-12, "derivative error {worst:.3e}");
}

#[test]
fn vertical_derivative_flips_parity() {
    let n = 8;
    let samples = sample_grid(n, |_, _, z| (TWO_PI * z).cos());
    let even = forward_transform(&samples, n).unwrap();
    let ddz = derivative(&even, Axis::X3);

    // d/dz of an even profile is odd: the odd projection is the identity on it
    // and the even projection annihilates it.
    let odd_part = enforce_z_parity(&ddz, Parity::Odd);
    let even_part = enforce_z_parity(&ddz, Parity::Even);
    let keep: f64 = ddz
        .coeffs()
        .iter()
        .zip(odd_part.coeffs())
        .fold(0.0, |m, (a, b)| m.max((a - b).norm()));
    assert!(keep <= 1e-14);
    assert!(even_part.max_abs() <= 1e-14);
}

#[test]
fn dealias_cutoff_examples() {
    let n = 12;
    let mut field = SpectralScalar::zeros(n);
    field.set(WaveVector::new(5, 0, 0), Complex64::new(1.0, 2.0));
    field.set(WaveVector::new(-5, 0, 0), Complex64::new(1.0, -2.0));
    field.set(WaveVector::new(3, 1, 0), Complex64::new(0.5, 0.0));
    let cut = dealias(&field);
    // The band on 12 points keeps max|k| <= 3; the mode at 5 is removed.
    assert_eq!(cut.get(WaveVector::new(5, 0, 0)), Complex64::new(0.0, 0.0));
    assert_eq!(cut.get(WaveVector::new(-5, 0, 0)), Complex64::new(0.0, 0.0));
    assert_eq!(cut.get(WaveVector::new(3, 1, 0)), Complex64::new(0.5, 0.0));
}

#[test]
fn dealias_boundary_mode_is_kept() {
    // At N = 32 the cutoff keeps max|k| = 10 (3*10 < 32) and drops 11.
    let n = 32;
    let mut field = SpectralScalar::zeros(n);
    field.set(WaveVector::new(10, 0, 0), Complex64::new(1.0, 0.0));
    field.set(WaveVector::new(11, 0, 0), Complex64::new(1.0, 0.0));
    let cut = dealias(&field);
    assert_eq!(cut.get(WaveVector::new(10, 0, 0)), Complex64::new(1.0, 0.0));
    assert_eq!(cut.get(WaveVector::new(11, 0, 0)), Complex64::new(0.0, 0.0));
}

#[test]
fn dealias_is_idempotent() {
    let n = 8;
    let samples = seeded_samples(n, 3);
    let field = forward_transform(&samples, n).unwrap();
    let once = dealias(&field);
    let twice = dealias(&once);
    assert_eq!(once.coeffs(), twice.coeffs());
}

#[test]
fn derivative_commutes_with_dealias() {
    let n = 8;
    let samples = seeded_samples(n, 9);
    let field = forward_transform(&samples, n).unwrap();
    let a = dealias(&derivative(&field, Axis::X2));
    let b = derivative(&dealias(&field), Axis::X2);
    let worst = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    assert!(worst == 0.0, "diagonal operations must commute exactly");
}

#[test]
fn parity_split_of_mixed_profile() {
    let n = 8;
    let samples = sample_grid(n, |_, _, z| (TWO_PI * z).cos() + (TWO_PI * z).sin());
    let field = forward_transform(&samples, n).unwrap();
    let even = enforce_z_parity(&field, Parity::Even);
    let odd = enforce_z_parity(&field, Parity::Odd);

    let even_vals = inverse_transform(&even).unwrap();
    let expected_even = sample_grid(n, |_, _, z| (TWO_PI * z).cos());
    let worst = even_vals
        .iter()
        .zip(&expected_even)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(worst <= 1e-13, "even part error {worst:.3e}");

    let odd_vals = inverse_transform(&odd).unwrap();
    let expected_odd = sample_grid(n, |_, _, z| (TWO_PI * z).sin());
    let worst = odd_vals
        .iter()
        .zip(&expected_odd)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(worst <= 1e-13, "odd part error {worst:.3e}");
}

#[test]
fn parity_projectors_are_idempotent_and_complementary() {
    let n = 8;
    let samples = seeded_samples(n, 29);
    let field = forward_transform(&samples, n).unwrap();
    let even = enforce_z_parity(&field, Parity::Even);
    let odd = enforce_z_parity(&field, Parity::Odd);

    let even2 = enforce_z_parity(&even, Parity::Even);
    assert_eq!(even.coeffs(), even2.coeffs());
    let odd2 = enforce_z_parity(&odd, Parity::Odd);
    assert_eq!(odd.coeffs(), odd2.coeffs());

    // Cross application annihilates.
    assert!(enforce_z_parity(&even, Parity::Odd).max_abs() == 0.0);
    assert!(enforce_z_parity(&odd, Parity::Even).max_abs() <= 1e-16);

    // The two parts reassemble the field.
    let sum = even.add(&odd);
    let worst = sum
        .coeffs()
        .iter()
        .zip(field.coeffs())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    assert!(worst <= 1e-15);
}

#[test]
fn odd_parity_zeroes_mean_plane() {
    let n = 8;
    let samples = sample_grid(n, |x1, _, _| (TWO_PI * x1).cos());
    let field = forward_transform(&samples, n).unwrap();
    let odd = enforce_z_parity(&field, Parity::Odd);
    for k1 in -3..=3 {
        for k2 in -3..=3 {
            assert_eq!(
                odd.get(WaveVector::new(k1, k2, 0)),
                Complex64::new(0.0, 0.0)
            );
        }
    }
}

#[test]
fn hermitian_enforcement() {
    let n = 6;
    let mut field = SpectralScalar::zeros(n);
    // Populate with asymmetric junk.
    let re = seeded_samples(n, 51);
    let im = seeded_samples(n, 53);
    for (i, c) in field.coeffs_mut().iter_mut().enumerate() {
        *c = Complex64::new(re[i], im[i]);
    }
    assert!(field.hermitian_residual() > 1e-3);
    field.enforce_hermitian();
    assert!(field.hermitian_residual() <= 1e-15);
    let snapshot = field.clone();
    field.enforce_hermitian();
    assert_eq!(snapshot.coeffs(), field.coeffs());
}

#[test]
fn conj_reflect_involution() {
    let n = 6;
    let re = seeded_samples(n, 61);
    let im = seeded_samples(n, 67);
    let mut field = SpectralScalar::zeros(n);
    for (i, c) in field.coeffs_mut().iter_mut().enumerate() {
        *c = Complex64::new(re[i], im[i]);
    }
    let twice = conj_reflect(&conj_reflect(&field));
    assert_eq!(field.coeffs(), twice.coeffs());

    // On a Hermitian field the reflection is the identity.
    field.enforce_hermitian();
    let reflected = conj_reflect(&field);
    let worst = field
        .coeffs()
        .iter()
        .zip(reflected.coeffs())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    assert!(worst <= 1e-16);
}
