//! Shared helpers: a quadrature oracle and band-limited random builders.
//!
//! The oracle evaluates fields at fine-grid points by literal mode sums,
//! forms products pointwise, and recovers coefficients with trapezoid
//! quadrature, which is exact for trigonometric polynomials that the fine
//! grid resolves. It shares no code with the transform path under test.

#![allow(dead_code)]

use num_complex::Complex64;
use projections::{leray2d, BarotropicField, BaroclinicField, SpectralPlane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::{modes, SpectralScalar, WaveVector};

pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Nonzero modes of a 3D coefficient field.
pub fn sparse_modes(f: &SpectralScalar) -> Vec<((i32, i32, i32), Complex64)> {
    let n = f.n();
    let mut out = Vec::new();
    for k in modes(n) {
        let c = f.get(k);
        if c.norm_sqr() > 0.0 {
            out.push(((k.k1, k.k2, k.k3), c));
        }
    }
    out
}

/// Nonzero modes of a plane field, as 3D modes on the k3 = 0 plane.
pub fn sparse_plane_modes(p: &SpectralPlane) -> Vec<((i32, i32, i32), Complex64)> {
    let n = p.n();
    let mut out = Vec::new();
    for k in modes(n) {
        if k.k3 != 0 {
            continue;
        }
        let c = p.get(k.k1, k.k2);
        if c.norm_sqr() > 0.0 {
            out.push(((k.k1, k.k2, 0), c));
        }
    }
    out
}

/// Multiply each mode by (2 pi i k_axis): the derivative along one axis.
pub fn deriv_modes(
    modes: &[((i32, i32, i32), Complex64)],
    axis: usize,
) -> Vec<((i32, i32, i32), Complex64)> {
    modes
        .iter()
        .map(|(k, c)| {
            let ka = match axis {
                1 => k.0,
                2 => k.1,
                3 => k.2,
                _ => panic!("axis must be 1, 2, or 3"),
            } as f64;
            (*k, Complex64::new(0.0, TWO_PI * ka) * c)
        })
        .collect()
}

/// Evaluate a sparse mode list at every point of an m^3 fine grid.
pub fn fine_values(modes: &[((i32, i32, i32), Complex64)], m: usize) -> Vec<Complex64> {
    let table = phase_table(m);
    let mut out = vec![Complex64::new(0.0, 0.0); m * m * m];
    for (k, c) in modes {
        for j1 in 0..m {
            let p1 = c * table[(k.0.rem_euclid(m as i32)) as usize * m + j1];
            for j2 in 0..m {
                let p12 = p1 * table[(k.1.rem_euclid(m as i32)) as usize * m + j2];
                for j3 in 0..m {
                    out[(j1 * m + j2) * m + j3] +=
                        p12 * table[(k.2.rem_euclid(m as i32)) as usize * m + j3];
                }
            }
        }
    }
    out
}

/// table[k * m + j] = exp(2 pi i k j / m), for k, j in 0..m.
fn phase_table(m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for k in 0..m {
        for j in 0..m {
            out[k * m + j] = Complex64::from_polar(1.0, TWO_PI * (k * j) as f64 / m as f64);
        }
    }
    out
}

/// Trapezoid-rule coefficient of one mode from fine-grid samples: exact
/// when the sampled function is a trigonometric polynomial of bandwidth
/// below m/2 per axis.
pub fn quadrature_coeff(vals: &[Complex64], m: usize, k: (i32, i32, i32)) -> Complex64 {
    let table = phase_table(m);
    let c1 = ((-k.0).rem_euclid(m as i32)) as usize;
    let c2 = ((-k.1).rem_euclid(m as i32)) as usize;
    let c3 = ((-k.2).rem_euclid(m as i32)) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for j1 in 0..m {
        let p1 = table[c1 * m + j1];
        for j2 in 0..m {
            let p12 = p1 * table[c2 * m + j2];
            for j3 in 0..m {
                acc += vals[(j1 * m + j2) * m + j3] * p12 * table[c3 * m + j3];
            }
        }
    }
    acc / (m * m * m) as f64
}

/// Pointwise product of two fine-grid sample sets.
pub fn pointwise_product(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

pub fn pointwise_sum(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn pointwise_scale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|x| x * s).collect()
}

/// Modewise pressure projection and sign flip of a plane pair, applied to
/// quadrature coefficients.
pub fn leray_negate_mode(phi: (Complex64, Complex64), k1: i32, k2: i32) -> (Complex64, Complex64) {
    if k1 == 0 && k2 == 0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let kf = (k1 as f64, k2 as f64);
    let kk = kf.0 * kf.0 + kf.1 * kf.1;
    let dot = (phi.0 * kf.0 + phi.1 * kf.1) / kk;
    (-(phi.0 - dot * kf.0), -(phi.1 - dot * kf.1))
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_tilde(n: usize, cap: i32, seed: u64) -> BaroclinicField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BaroclinicField::zeros(n);
    for comp in [&mut out.c1, &mut out.c2] {
        for k1 in -cap..=cap {
            for k2 in -cap..=cap {
                for k3 in 1..=cap {
                    comp.set(WaveVector::new(k1, k2, k3), 0.3 * random_coeff(&mut rng));
                }
            }
        }
    }
    out.sanitize();
    out
}

pub fn random_bar(n: usize, cap: i32, seed: u64) -> BarotropicField {
    random_bar_scaled(n, cap, seed, 0.3)
}

pub fn random_bar_scaled(n: usize, cap: i32, seed: u64, amp: f64) -> BarotropicField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p1 = SpectralPlane::zeros(n);
    let mut p2 = SpectralPlane::zeros(n);
    for comp in [&mut p1, &mut p2] {
        for k1 in -cap..=cap {
            for k2 in -cap..=cap {
                if k1 == 0 && k2 == 0 {
                    continue;
                }
                comp.set(k1, k2, amp * random_coeff(&mut rng));
            }
        }
        comp.enforce_hermitian();
        comp.set_mean_zero();
    }
    let mut out = leray2d(&p1, &p2).expect("mean already removed");
    out.sanitize();
    out
}

/// The cellular flow (sin(2 pi x1) cos(2 pi x2), -cos(2 pi x1) sin(2 pi x2)),
/// divergence-free and steady under plane Euler.
pub fn taylor_green_bar(n: usize) -> BarotropicField {
    let mut c1 = SpectralPlane::zeros(n);
    let mut c2 = SpectralPlane::zeros(n);
    let iq = Complex64::new(0.0, 0.25);
    c1.set(1, 1, -iq);
    c1.set(1, -1, -iq);
    c1.set(-1, 1, iq);
    c1.set(-1, -1, iq);
    c2.set(1, 1, iq);
    c2.set(-1, 1, iq);
    c2.set(1, -1, -iq);
    c2.set(-1, -1, -iq);
    BarotropicField { c1, c2 }
}
