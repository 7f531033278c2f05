//! Oracle helpers shared by the integration tests.
//!
//! Everything here computes transforms by direct summation over the grid, so
//! the values are independent of the FFT path under test.

use num_complex::Complex64;
use spectral_core::WaveVector;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Sample a scalar function on the N^3 grid in the layout used by the crate.
pub fn sample_grid(n: usize, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * n * n);
    for i1 in 0..n {
        for i2 in 0..n {
            for i3 in 0..n {
                let x1 = i1 as f64 / n as f64;
                let x2 = i2 as f64 / n as f64;
                let x3 = i3 as f64 / n as f64;
                out.push(f(x1, x2, x3));
            }
        }
    }
    out
}

/// One coefficient by the direct O(N^3) sum (1/N^3) sum_x f(x) e^{-2 pi i k.x}.
pub fn dft_coefficient(samples: &[f64], n: usize, k: WaveVector) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i1 in 0..n {
        for i2 in 0..n {
            for i3 in 0..n {
                let phase = TWO_PI
                    * (k.k1 as f64 * i1 as f64 + k.k2 as f64 * i2 as f64 + k.k3 as f64 * i3 as f64)
                    / n as f64;
                let v = samples[(i1 * n + i2) * n + i3];
                acc += v * Complex64::new(phase.cos(), -phase.sin());
            }
        }
    }
    acc / (n * n * n) as f64
}

/// Field value at a grid node by direct synthesis over all retained modes.
pub fn synthesize_at(
    coeffs: &dyn Fn(WaveVector) -> Complex64,
    n: usize,
    i1: usize,
    i2: usize,
    i3: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in spectral_core::modes(n) {
        let phase = TWO_PI
            * (k.k1 as f64 * i1 as f64 + k.k2 as f64 * i2 as f64 + k.k3 as f64 * i3 as f64)
            / n as f64;
        acc += coeffs(k) * Complex64::new(phase.cos(), phase.sin());
    }
    acc
}

pub fn seeded_samples(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    (0..n * n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
