//! Two-dimensional coefficient planes.
//!
//! A `SpectralPlane` is the k3 = 0 restriction of a 3D field: an N x N
//! coefficient array over horizontal wavevectors with the same conventions as
//! `spectral_core` (forward transform divides by N^2, mean in slot zero).

use num_complex::Complex64;
use spectral_core::{fft2, k_to_slot, slot_to_k, SpectralScalar};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPlane {
    n: usize,
    data: Vec<Complex64>,
}

/// Horizontal axis selector for `SpectralPlane::derivative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneAxis {
    X1,
    X2,
}

impl SpectralPlane {
    pub fn zeros(n: usize) -> Self {
        SpectralPlane {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.data
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn slot_of(&self, k1: i32, k2: i32) -> usize {
        k_to_slot(k1, self.n) * self.n + k_to_slot(k2, self.n)
    }

    pub fn get(&self, k1: i32, k2: i32) -> Complex64 {
        self.data[self.slot_of(k1, k2)]
    }

    pub fn set(&mut self, k1: i32, k2: i32, value: Complex64) {
        let idx = self.slot_of(k1, k2);
        self.data[idx] = value;
    }

    pub fn mean(&self) -> Complex64 {
        self.data[0]
    }

    pub fn set_mean_zero(&mut self) {
        self.data[0] = Complex64::new(0.0, 0.0);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.data {
            *c *= a;
        }
    }

    pub fn axpy(&mut self, a: f64, other: &SpectralPlane) {
        assert_eq!(self.n, other.n, "grid mismatch in plane axpy");
        for (c, o) in self.data.iter_mut().zip(&other.data) {
            *c += a * o;
        }
    }

    pub fn scale_complex(&mut self, a: Complex64) {
        for c in &mut self.data {
            *c *= a;
        }
    }

    pub fn axpy_complex(&mut self, a: Complex64, other: &SpectralPlane) {
        assert_eq!(self.n, other.n, "grid mismatch in plane axpy");
        for (c, o) in self.data.iter_mut().zip(&other.data) {
            *c += a * o;
        }
    }

    pub fn add(&self, other: &SpectralPlane) -> SpectralPlane {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SpectralPlane) -> SpectralPlane {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Physical samples on the N x N grid (x_i = i/N), real part.
    pub fn values(&self) -> Vec<f64> {
        let mut data = self.data.clone();
        fft2(&mut data, self.n, false);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Forward transform of real samples in `i1*n + i2` layout.
    pub fn from_values(values: &[f64], n: usize) -> SpectralPlane {
        assert_eq!(values.len(), n * n, "bad sample count for plane");
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut data, n, true);
        SpectralPlane { n, data }
    }

    /// Spectral derivative: multiply by 2 pi i k_axis.
    pub fn derivative(&self, axis: PlaneAxis) -> SpectralPlane {
        let n = self.n;
        let mut out = self.clone();
        let two_pi = 2.0 * std::f64::consts::PI;
        for i1 in 0..n {
            for i2 in 0..n {
                let k = match axis {
                    PlaneAxis::X1 => slot_to_k(i1, n),
                    PlaneAxis::X2 => slot_to_k(i2, n),
                };
                out.data[i1 * n + i2] *= Complex64::new(0.0, two_pi * k as f64);
            }
        }
        out
    }

    /// Two-thirds rule on the horizontal wavevector.
    pub fn dealias(&self) -> SpectralPlane {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub fn dealias_in_place(&mut self) {
        let n = self.n;
        let keep = spectral_core::band_limit(n);
        for i1 in 0..n {
            let k1 = slot_to_k(i1, n).unsigned_abs();
            for i2 in 0..n {
                let k2 = slot_to_k(i2, n).unsigned_abs();
                if k1.max(k2) > keep {
                    self.data[i1 * n + i2] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    pub fn hermitian_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i1 in 0..n {
            let r1 = (n - i1) % n;
            for i2 in 0..n {
                let r2 = (n - i2) % n;
                let a = self.data[i1 * n + i2];
                let b = self.data[r1 * n + r2];
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }

    pub fn enforce_hermitian(&mut self) {
        let n = self.n;
        for i1 in 0..n {
            let r1 = (n - i1) % n;
            for i2 in 0..n {
                let r2 = (n - i2) % n;
                let idx = i1 * n + i2;
                let ridx = r1 * n + r2;
                if idx < ridx {
                    let avg = 0.5 * (self.data[idx] + self.data[ridx].conj());
                    self.data[idx] = avg;
                    self.data[ridx] = avg.conj();
                } else if idx == ridx {
                    self.data[idx] = Complex64::new(self.data[idx].re, 0.0);
                }
            }
        }
    }

    /// Embed into a 3D field supported on the k3 = 0 plane (a z-independent
    /// function of the horizontal coordinates).
    pub fn broadcast(&self) -> SpectralScalar {
        let n = self.n;
        let mut out = SpectralScalar::zeros(n);
        let coeffs = out.coeffs_mut();
        for i1 in 0..n {
            for i2 in 0..n {
                coeffs[(i1 * n + i2) * n] = self.data[i1 * n + i2];
            }
        }
        out
    }

    /// Extract the k3 = 0 plane of a 3D field.
    pub fn from_plane_of(field: &SpectralScalar) -> SpectralPlane {
        let n = field.n();
        let mut out = SpectralPlane::zeros(n);
        let coeffs = field.coeffs();
        for i1 in 0..n {
            for i2 in 0..n {
                out.data[i1 * n + i2] = coeffs[(i1 * n + i2) * n];
            }
        }
        out
    }
}
