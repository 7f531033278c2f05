//! Truncated Fourier representation of periodic fields on the unit torus.
//!
//! Fields live on an N x N x N grid (N even) with nodes x_i = i/N. The
//! coefficient convention is
//!
//! ```text
//! f(x) = sum_k fhat_k exp(2 pi i k.x),   fhat_k = (1/N^3) sum_x f(x) exp(-2 pi i k.x)
//! ```
//!
//! so `fhat_0` is the mean of the field. Wavevectors are signed integers with
//! |k_i| <= N/2; the +N/2 and -N/2 entries share the single Nyquist slot of the
//! DFT. Norm weights elsewhere in the workspace use the integer lattice length
//! |k|, while derivatives carry the 2 pi factor from the exponent.

mod transform;

pub mod snapshot;

pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC};
pub use transform::{fft2, fft3};

use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance for the Hermitian symmetry check in `inverse_transform`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid size {n} is not an even number >= 2")]
    GridNotEven { n: usize },
    #[error("sample buffer has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at flat index {index}")]
    NonFiniteSample { index: usize },
    #[error("Hermitian symmetry violated: residual {residual:.3e} exceeds {tolerance:.3e}")]
    SymmetryViolation { residual: f64, tolerance: f64 },
    #[error("grid sizes differ: {a} vs {b}")]
    GridMismatch { a: usize, b: usize },
    #[error("snapshot format error: {0}")]
    BadSnapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Signed integer wavevector. The derived ordering is lexicographic in
/// (k1, k2, k3), which fixes the on-disk coefficient order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WaveVector {
    pub k1: i32,
    pub k2: i32,
    pub k3: i32,
}

impl WaveVector {
    pub fn new(k1: i32, k2: i32, k3: i32) -> Self {
        WaveVector { k1, k2, k3 }
    }

    /// Euclidean lattice length |k|.
    pub fn norm(&self) -> f64 {
        let (a, b, c) = (self.k1 as f64, self.k2 as f64, self.k3 as f64);
        (a * a + b * b + c * c).sqrt()
    }

    /// max(|k1|, |k2|, |k3|), the quantity tested by the dealiasing rule.
    pub fn max_abs(&self) -> i32 {
        self.k1.abs().max(self.k2.abs()).max(self.k3.abs())
    }
}

/// Signed frequency represented by DFT slot `i` on a grid of size `n`.
#[inline]
pub fn slot_to_k(i: usize, n: usize) -> i32 {
    if i <= n / 2 {
        i as i32
    } else {
        i as i32 - n as i32
    }
}

/// DFT slot holding frequency `k` on a grid of size `n`. Accepts any integer;
/// +-N/2 resolve to the same Nyquist slot.
#[inline]
pub fn k_to_slot(k: i32, n: usize) -> usize {
    let n = n as i32;
    (((k % n) + n) % n) as usize
}

/// All retained wavevectors of an N-grid in lexicographic order. Each axis
/// ranges over -(N/2 - 1) ..= N/2.
pub fn modes(n: usize) -> impl Iterator<Item = WaveVector> {
    let lo = -(n as i32 / 2 - 1);
    let hi = n as i32 / 2;
    (lo..=hi).flat_map(move |k1| {
        (lo..=hi).flat_map(move |k2| (lo..=hi).map(move |k3| WaveVector::new(k1, k2, k3)))
    })
}

/// Complex Fourier coefficients of one scalar field on an N^3 grid.
///
/// Storage is a flat vector indexed by `(i1 * n + i2) * n + i3` in DFT slot
/// order. Real-valued fields keep the Hermitian symmetry
/// `fhat(-k) = conj(fhat(k))`; the symmetry is checked on inverse transform,
/// not on every mutation, so complex-valued work fields can reuse this type.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    n: usize,
    data: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(n: usize) -> Self {
        SpectralScalar {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n * n],
        }
    }

    pub fn from_coeffs(n: usize, data: Vec<Complex64>) -> Result<Self, SpectralError> {
        if n < 2 || n % 2 != 0 {
            return Err(SpectralError::GridNotEven { n });
        }
        if data.len() != n * n * n {
            return Err(SpectralError::LengthMismatch {
                expected: n * n * n,
                got: data.len(),
            });
        }
        Ok(SpectralScalar { n, data })
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
    pub fn slot_of(&self, k: WaveVector) -> usize {
        let n = self.n;
        (k_to_slot(k.k1, n) * n + k_to_slot(k.k2, n)) * n + k_to_slot(k.k3, n)
    }

    pub fn get(&self, k: WaveVector) -> Complex64 {
        self.data[self.slot_of(k)]
    }

    pub fn set(&mut self, k: WaveVector, value: Complex64) {
        let idx = self.slot_of(k);
        self.data[idx] = value;
    }

    /// Mean of the field, i.e. the k = 0 coefficient.
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

    pub fn scale_complex(&mut self, a: Complex64) {
        for c in &mut self.data {
            *c *= a;
        }
    }

    /// self += a * other.
    pub fn axpy(&mut self, a: f64, other: &SpectralScalar) {
        assert_eq!(self.n, other.n, "grid mismatch in axpy");
        for (c, o) in self.data.iter_mut().zip(&other.data) {
            *c += a * o;
        }
    }

    pub fn add(&self, other: &SpectralScalar) -> SpectralScalar {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SpectralScalar) -> SpectralScalar {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Largest |fhat(k) - conj(fhat(-k))| over all modes.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i1 in 0..n {
            let r1 = (n - i1) % n;
            for i2 in 0..n {
                let r2 = (n - i2) % n;
                for i3 in 0..n {
                    let r3 = (n - i3) % n;
                    let a = self.data[(i1 * n + i2) * n + i3];
                    let b = self.data[(r1 * n + r2) * n + r3];
                    worst = worst.max((a - b.conj()).norm());
                }
            }
        }
        worst
    }

    /// Symmetrize toward `fhat(-k) = conj(fhat(k))` by averaging mode pairs.
    pub fn enforce_hermitian(&mut self) {
        let n = self.n;
        for i1 in 0..n {
            let r1 = (n - i1) % n;
            for i2 in 0..n {
                let r2 = (n - i2) % n;
                for i3 in 0..n {
                    let r3 = (n - i3) % n;
                    let idx = (i1 * n + i2) * n + i3;
                    let ridx = (r1 * n + r2) * n + r3;
                    if idx < ridx {
                        let a = self.data[idx];
                        let b = self.data[ridx];
                        let avg = 0.5 * (a + b.conj());
                        self.data[idx] = avg;
                        self.data[ridx] = avg.conj();
                    } else if idx == ridx {
                        self.data[idx] = Complex64::new(self.data[idx].re, 0.0);
                    }
                }
            }
        }
    }
}

/// Coordinate axis selector for `derivative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    /// 1-based axis index as used in configuration files.
    pub fn from_index(i: u8) -> Option<Axis> {
        match i {
            1 => Some(Axis::X1),
            2 => Some(Axis::X2),
            3 => Some(Axis::X3),
            _ => None,
        }
    }
}

/// Forward transform of real samples (layout `(i1*n + i2)*n + i3`, x_i = i/N).
/// Divides by N^3 so the zero mode is the mean.
pub fn forward_transform(samples: &[f64], n: usize) -> Result<SpectralScalar, SpectralError> {
    validate_grid(n, samples.len())?;
    if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
        return Err(SpectralError::NonFiniteSample { index });
    }
    let data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut field = SpectralScalar { n, data };
    transform::fft3(&mut field.data, n, true);
    Ok(field)
}

/// Forward transform of complex samples. No symmetry is implied.
pub fn forward_transform_complex(
    samples: &[Complex64],
    n: usize,
) -> Result<SpectralScalar, SpectralError> {
    validate_grid(n, samples.len())?;
    if let Some(index) = samples
        .iter()
        .position(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(SpectralError::NonFiniteSample { index });
    }
    let mut field = SpectralScalar {
        n,
        data: samples.to_vec(),
    };
    transform::fft3(&mut field.data, n, true);
    Ok(field)
}

/// Evaluate a real field on the grid. Fails if the coefficients are not
/// Hermitian within `HERMITIAN_TOLERANCE` relative to the largest coefficient.
pub fn inverse_transform(field: &SpectralScalar) -> Result<Vec<f64>, SpectralError> {
    let residual = field.hermitian_residual();
    let tolerance = HERMITIAN_TOLERANCE * field.max_abs().max(1.0);
    if residual > tolerance {
        return Err(SpectralError::SymmetryViolation {
            residual,
            tolerance,
        });
    }
    let mut data = field.data.clone();
    transform::fft3(&mut data, field.n, false);
    Ok(data.into_iter().map(|c| c.re).collect())
}

/// Evaluate a complex field on the grid.
pub fn inverse_transform_complex(field: &SpectralScalar) -> Vec<Complex64> {
    let mut data = field.data.clone();
    transform::fft3(&mut data, field.n, false);
    data
}

/// Spectral derivative along one axis: multiply by 2 pi i k_axis.
pub fn derivative(field: &SpectralScalar, axis: Axis) -> SpectralScalar {
    let n = field.n;
    let mut out = field.clone();
    let two_pi = 2.0 * std::f64::consts::PI;
    for i1 in 0..n {
        for i2 in 0..n {
            for i3 in 0..n {
                let k = match axis {
                    Axis::X1 => slot_to_k(i1, n),
                    Axis::X2 => slot_to_k(i2, n),
                    Axis::X3 => slot_to_k(i3, n),
                };
                let idx = (i1 * n + i2) * n + i3;
                out.data[idx] *= Complex64::new(0.0, two_pi * k as f64);
            }
        }
    }
    out
}

/// Two-thirds rule: zero every mode with max(|k1|,|k2|,|k3|) > N/3.
pub fn dealias(field: &SpectralScalar) -> SpectralScalar {
    let mut out = field.clone();
    dealias_in_place(&mut out);
    out
}

/// Largest |k_i| the truncation keeps on an n-point grid. The band
/// satisfies 3K < n strictly, so quadratic products of retained modes alias
/// only into modes the truncation removes; coefficients inside the band are
/// exact convolutions. Equality (3K = n) would let the corner interactions
/// K + K fold back onto -K.
pub fn band_limit(n: usize) -> u32 {
    ((n - 1) / 3) as u32
}

pub fn dealias_in_place(field: &mut SpectralScalar) {
    let n = field.n;
    let keep = band_limit(n);
    for i1 in 0..n {
        let k1 = slot_to_k(i1, n).unsigned_abs();
        for i2 in 0..n {
            let k2 = slot_to_k(i2, n).unsigned_abs();
            for i3 in 0..n {
                let k3 = slot_to_k(i3, n).unsigned_abs();
                if k1.max(k2).max(k3) > keep {
                    field.data[(i1 * n + i2) * n + i3] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
}

/// Parity class in the vertical coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Project onto the even or odd part in z by symmetrizing the k3 pairs.
/// Even: both slots get the average. Odd: the half difference, with the
/// k3 = 0 plane (and the self-paired Nyquist plane) zeroed.
pub fn enforce_z_parity(field: &SpectralScalar, parity: Parity) -> SpectralScalar {
    let mut out = field.clone();
    enforce_z_parity_in_place(&mut out, parity);
    out
}

pub fn enforce_z_parity_in_place(field: &mut SpectralScalar, parity: Parity) {
    let n = field.n;
    for i1 in 0..n {
        for i2 in 0..n {
            let base = (i1 * n + i2) * n;
            // Self-paired planes i3 = 0 and i3 = n/2.
            match parity {
                Parity::Even => {}
                Parity::Odd => {
                    field.data[base] = Complex64::new(0.0, 0.0);
                    field.data[base + n / 2] = Complex64::new(0.0, 0.0);
                }
            }
            for i3 in 1..n / 2 {
                let a = field.data[base + i3];
                let b = field.data[base + n - i3];
                match parity {
                    Parity::Even => {
                        let avg = 0.5 * (a + b);
                        field.data[base + i3] = avg;
                        field.data[base + n - i3] = avg;
                    }
                    Parity::Odd => {
                        let half = 0.5 * (a - b);
                        field.data[base + i3] = half;
                        field.data[base + n - i3] = -half;
                    }
                }
            }
        }
    }
}

/// Pointwise complex conjugate as a coefficient map: out(k) = conj(in(-k)).
pub fn conj_reflect(field: &SpectralScalar) -> SpectralScalar {
    let n = field.n;
    let mut out = SpectralScalar::zeros(n);
    for i1 in 0..n {
        let r1 = (n - i1) % n;
        for i2 in 0..n {
            let r2 = (n - i2) % n;
            for i3 in 0..n {
                let r3 = (n - i3) % n;
                out.data[(i1 * n + i2) * n + i3] = self_conj(field.data[(r1 * n + r2) * n + r3]);
            }
        }
    }
    out
}

#[inline]
fn self_conj(c: Complex64) -> Complex64 {
    c.conj()
}

fn validate_grid(n: usize, len: usize) -> Result<(), SpectralError> {
    if n < 2 || n % 2 != 0 {
        return Err(SpectralError::GridNotEven { n });
    }
    if len != n * n * n {
        return Err(SpectralError::LengthMismatch {
            expected: n * n * n,
            got: len,
        });
    }
    Ok(())
}

/// Two-component horizontal velocity on the 3D grid. The physical constraints
/// (real-valued, even in z, zero total mean) are re-enforced by callers at
/// well-defined points rather than on every mutation.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalVelocity {
    pub comp1: SpectralScalar,
    pub comp2: SpectralScalar,
}

impl HorizontalVelocity {
    pub fn zeros(n: usize) -> Self {
        HorizontalVelocity {
            comp1: SpectralScalar::zeros(n),
            comp2: SpectralScalar::zeros(n),
        }
    }

    pub fn new(comp1: SpectralScalar, comp2: SpectralScalar) -> Result<Self, SpectralError> {
        if comp1.n() != comp2.n() {
            return Err(SpectralError::GridMismatch {
                a: comp1.n(),
                b: comp2.n(),
            });
        }
        Ok(HorizontalVelocity { comp1, comp2 })
    }

    pub fn n(&self) -> usize {
        self.comp1.n
    }

    /// Re-enforce the invariants of a physical velocity: Hermitian symmetry,
    /// even vertical parity, zero total mean.
    pub fn sanitize(&mut self) {
        for comp in [&mut self.comp1, &mut self.comp2] {
            comp.enforce_hermitian();
            enforce_z_parity_in_place(comp, Parity::Even);
            comp.set_mean_zero();
        }
    }

    pub fn is_finite(&self) -> bool {
        self.comp1.is_finite() && self.comp2.is_finite()
    }
}
