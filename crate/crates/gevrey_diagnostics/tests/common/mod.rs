#![allow(dead_code)]

//! Seeded random fields for norm and radius tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use spectral_core::{modes, HorizontalVelocity, SpectralScalar};

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

/// Field whose coefficients have magnitude exactly `exp(-rate |k|)` away
/// from the origin.
pub fn exponential_spectrum(n: usize, rate: f64) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(n);
    for k in modes(n) {
        if k.k1 == 0 && k.k2 == 0 && k.k3 == 0 {
            continue;
        }
        out.set(k, Complex64::new((-rate * k.norm()).exp(), 0.0));
    }
    out
}
