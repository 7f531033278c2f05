#![allow(dead_code)]

//! Shared builders for projection tests. Random fields are seeded and the
//! synthesis helper evaluates a coefficient field by direct mode summation,
//! independent of the FFT path.

use num_complex::Complex64;
use projections::{baroclinic, BaroclinicField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use spectral_core::{modes, HorizontalVelocity, SpectralScalar};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Random coefficients with a mild radial decay, no symmetry enforced.
pub fn random_scalar(n: usize, seed: u64, decay: f64) -> SpectralScalar {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = SpectralScalar::zeros(n);
    for k in modes(n) {
        let amp = (-decay * k.norm()).exp();
        let c = Complex64::new(
            amp * rng.gen_range(-1.0..1.0),
            amp * rng.gen_range(-1.0..1.0),
        );
        out.set(k, c);
    }
    out
}

/// Random real, z-even, zero-mean horizontal velocity on the dealiased band.
/// Keeping clear of the Nyquist planes matters for parity statements: the
/// sine partner of the vertical Nyquist cosine is not representable, so only
/// band-limited fields behave like their continuum counterparts.
pub fn random_velocity(n: usize, seed: u64) -> HorizontalVelocity {
    let mut v = HorizontalVelocity {
        comp1: random_scalar(n, seed, 0.4),
        comp2: random_scalar(n, seed.wrapping_add(101), 0.4),
    };
    spectral_core::dealias_in_place(&mut v.comp1);
    spectral_core::dealias_in_place(&mut v.comp2);
    v.sanitize();
    v
}

/// Random baroclinic field (real, z-even, zero mean plane).
pub fn random_baroclinic(n: usize, seed: u64) -> BaroclinicField {
    baroclinic(&random_velocity(n, seed))
}

/// Evaluate a coefficient field at an arbitrary point by direct mode sum.
pub fn synthesize(field: &SpectralScalar, x: [f64; 3]) -> Complex64 {
    let n = field.n();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in modes(n) {
        let phase = TWO_PI * (k.k1 as f64 * x[0] + k.k2 as f64 * x[1] + k.k3 as f64 * x[2]);
        acc += field.get(k) * Complex64::new(0.0, phase).exp();
    }
    acc
}

/// Squared coefficient l2 sum of a scalar field.
pub fn l2_sq(field: &SpectralScalar) -> f64 {
    field.coeffs().iter().map(|c| c.norm_sqr()).sum()
}

pub fn max_coeff_diff(a: &SpectralScalar, b: &SpectralScalar) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
