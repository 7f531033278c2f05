//! Projection calculus for torus velocity fields.
//!
//! Splits a horizontal velocity into its depth-averaged (barotropic) and
//! depth-varying (baroclinic) parts, applies the horizontal Leray projection
//! on the mean plane, forms the complex oscillation variables
//! `u_plus = (vtilde + i vtilde_perp) / 2`, and evaluates the vertical
//! integral of the horizontal divergence that closes the vertical velocity.

mod plane;

pub use plane::{PlaneAxis, SpectralPlane};

use num_complex::Complex64;
use spectral_core::{
    conj_reflect, enforce_z_parity_in_place, slot_to_k, HorizontalVelocity, Parity,
    SpectralError, SpectralScalar,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("input must have zero mean, |mean| = {mean:.3e}")]
    NonzeroMean { mean: f64 },
    #[error("input must vanish on the k3 = 0 plane, residual {residual:.3e}")]
    NonzeroPlane { residual: f64 },
    #[error("grid sizes differ: {a} vs {b}")]
    GridMismatch { a: usize, b: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Depth-averaged horizontal velocity: the k3 = 0 coefficient plane. The
/// physical invariants are zero mean, Hermitian symmetry, and vanishing
/// horizontal divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct BarotropicField {
    pub c1: SpectralPlane,
    pub c2: SpectralPlane,
}

impl BarotropicField {
    pub fn zeros(n: usize) -> Self {
        BarotropicField {
            c1: SpectralPlane::zeros(n),
            c2: SpectralPlane::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.c1.n()
    }

    pub fn perp(&self) -> BarotropicField {
        let mut p1 = self.c2.clone();
        p1.scale(-1.0);
        BarotropicField {
            c1: p1,
            c2: self.c1.clone(),
        }
    }

    /// Horizontal divergence as a coefficient plane.
    pub fn divergence(&self) -> SpectralPlane {
        self.c1
            .derivative(PlaneAxis::X1)
            .add(&self.c2.derivative(PlaneAxis::X2))
    }

    pub fn divergence_residual(&self) -> f64 {
        self.divergence().max_abs()
    }

    pub fn mean_residual(&self) -> f64 {
        self.c1.mean().norm().max(self.c2.mean().norm())
    }

    pub fn scale(&mut self, a: f64) {
        self.c1.scale(a);
        self.c2.scale(a);
    }

    pub fn axpy(&mut self, a: f64, other: &BarotropicField) {
        self.c1.axpy(a, &other.c1);
        self.c2.axpy(a, &other.c2);
    }

    pub fn sub(&self, other: &BarotropicField) -> BarotropicField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }

    /// Re-enforce invariants after arithmetic: Hermitian symmetry and zero
    /// mean. Divergence is handled by the Leray projection where tendencies
    /// are assembled.
    pub fn sanitize(&mut self) {
        self.c1.enforce_hermitian();
        self.c2.enforce_hermitian();
        self.c1.set_mean_zero();
        self.c2.set_mean_zero();
    }
}

/// Depth-varying part of a horizontal velocity: full 3D coefficients with the
/// k3 = 0 plane identically zero, even in z, real-valued.
#[derive(Debug, Clone, PartialEq)]
pub struct BaroclinicField {
    pub c1: SpectralScalar,
    pub c2: SpectralScalar,
}

impl BaroclinicField {
    pub fn zeros(n: usize) -> Self {
        BaroclinicField {
            c1: SpectralScalar::zeros(n),
            c2: SpectralScalar::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.c1.n()
    }

    pub fn perp(&self) -> BaroclinicField {
        let mut p1 = self.c2.clone();
        p1.scale(-1.0);
        BaroclinicField {
            c1: p1,
            c2: self.c1.clone(),
        }
    }

    /// Largest coefficient magnitude on the k3 = 0 plane.
    pub fn plane_residual(&self) -> f64 {
        plane_residual_of(&self.c1).max(plane_residual_of(&self.c2))
    }

    pub fn scale(&mut self, a: f64) {
        self.c1.scale(a);
        self.c2.scale(a);
    }

    pub fn axpy(&mut self, a: f64, other: &BaroclinicField) {
        self.c1.axpy(a, &other.c1);
        self.c2.axpy(a, &other.c2);
    }

    pub fn sub(&self, other: &BaroclinicField) -> BaroclinicField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.c1.max_abs().max(self.c2.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }

    /// Re-enforce invariants after arithmetic: Hermitian symmetry, even
    /// vertical parity, zero k3 = 0 plane.
    pub fn sanitize(&mut self) {
        for comp in [&mut self.c1, &mut self.c2] {
            comp.enforce_hermitian();
            enforce_z_parity_in_place(comp, Parity::Even);
            zero_plane_in_place(comp);
        }
    }
}

/// Complex two-component field without Hermitian symmetry, supported off the
/// k3 = 0 plane. Holds the oscillation variable u_plus; its conjugate partner
/// is derived on demand and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVelocity {
    pub c1: SpectralScalar,
    pub c2: SpectralScalar,
}

impl ComplexVelocity {
    pub fn zeros(n: usize) -> Self {
        ComplexVelocity {
            c1: SpectralScalar::zeros(n),
            c2: SpectralScalar::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.c1.n()
    }

    pub fn perp(&self) -> ComplexVelocity {
        let mut p1 = self.c2.clone();
        p1.scale(-1.0);
        ComplexVelocity {
            c1: p1,
            c2: self.c1.clone(),
        }
    }

    pub fn plane_residual(&self) -> f64 {
        plane_residual_of(&self.c1).max(plane_residual_of(&self.c2))
    }

    pub fn scale(&mut self, a: f64) {
        self.c1.scale(a);
        self.c2.scale(a);
    }

    pub fn scale_complex(&mut self, a: Complex64) {
        self.c1.scale_complex(a);
        self.c2.scale_complex(a);
    }

    pub fn axpy(&mut self, a: f64, other: &ComplexVelocity) {
        self.c1.axpy(a, &other.c1);
        self.c2.axpy(a, &other.c2);
    }

    pub fn sub(&self, other: &ComplexVelocity) -> ComplexVelocity {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.c1.max_abs().max(self.c2.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }

    pub fn zero_plane(&mut self) {
        zero_plane_in_place(&mut self.c1);
        zero_plane_in_place(&mut self.c2);
    }
}

fn plane_residual_of(field: &SpectralScalar) -> f64 {
    let n = field.n();
    let coeffs = field.coeffs();
    let mut worst = 0.0f64;
    for i1 in 0..n {
        for i2 in 0..n {
            worst = worst.max(coeffs[(i1 * n + i2) * n].norm());
        }
    }
    worst
}

fn zero_plane_in_place(field: &mut SpectralScalar) {
    let n = field.n();
    let coeffs = field.coeffs_mut();
    for i1 in 0..n {
        for i2 in 0..n {
            coeffs[(i1 * n + i2) * n] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Depth average: restrict to the k3 = 0 coefficient plane.
pub fn barotropic(v: &HorizontalVelocity) -> BarotropicField {
    BarotropicField {
        c1: SpectralPlane::from_plane_of(&v.comp1),
        c2: SpectralPlane::from_plane_of(&v.comp2),
    }
}

/// Depth-varying remainder: zero the k3 = 0 plane.
pub fn baroclinic(v: &HorizontalVelocity) -> BaroclinicField {
    let mut c1 = v.comp1.clone();
    let mut c2 = v.comp2.clone();
    zero_plane_in_place(&mut c1);
    zero_plane_in_place(&mut c2);
    BaroclinicField { c1, c2 }
}

/// Reassemble a velocity from its split parts.
pub fn assemble(vbar: &BarotropicField, vtilde: &BaroclinicField) -> HorizontalVelocity {
    let mut comp1 = vbar.c1.broadcast();
    comp1.axpy(1.0, &vtilde.c1);
    let mut comp2 = vbar.c2.broadcast();
    comp2.axpy(1.0, &vtilde.c2);
    HorizontalVelocity { comp1, comp2 }
}

/// Horizontal Leray projection on the mean plane:
/// `phi - k' (k'.phi) / |k'|^2` for every k' != 0. Rejects nonzero-mean input.
pub fn leray2d(c1: &SpectralPlane, c2: &SpectralPlane) -> Result<BarotropicField, ProjectionError> {
    if c1.n() != c2.n() {
        return Err(ProjectionError::GridMismatch {
            a: c1.n(),
            b: c2.n(),
        });
    }
    let scale = c1.max_abs().max(c2.max_abs()).max(1.0);
    let mean = c1.mean().norm().max(c2.mean().norm());
    if mean > 1e-12 * scale {
        return Err(ProjectionError::NonzeroMean { mean });
    }
    let n = c1.n();
    let mut out = BarotropicField {
        c1: c1.clone(),
        c2: c2.clone(),
    };
    for i1 in 0..n {
        let k1 = slot_to_k(i1, n) as f64;
        for i2 in 0..n {
            let k2 = slot_to_k(i2, n) as f64;
            let kk = k1 * k1 + k2 * k2;
            if kk == 0.0 {
                continue;
            }
            let idx = i1 * n + i2;
            let a = out.c1.coeffs()[idx];
            let b = out.c2.coeffs()[idx];
            let dot = (k1 * a + k2 * b) / kk;
            out.c1.coeffs_mut()[idx] = a - dot * k1;
            out.c2.coeffs_mut()[idx] = b - dot * k2;
        }
    }
    Ok(out)
}

/// Half-sum with i times the perp, applied to a baroclinic pair:
/// `(phi + i phi_perp) / 2`, i.e. `((phi1 - i phi2)/2, (phi2 + i phi1)/2)`.
pub fn p_plus_components(
    c1: &SpectralScalar,
    c2: &SpectralScalar,
) -> (SpectralScalar, SpectralScalar) {
    let i = Complex64::new(0.0, 1.0);
    let half = Complex64::new(0.5, 0.0);
    let mut o1 = c1.clone();
    let mut o2 = c2.clone();
    for ((a, b), (x, y)) in o1
        .coeffs_mut()
        .iter_mut()
        .zip(o2.coeffs_mut().iter_mut())
        .zip(c1.coeffs().iter().zip(c2.coeffs()))
    {
        *a = half * (x - i * y);
        *b = half * (y + i * x);
    }
    (o1, o2)
}

/// `(phi - i phi_perp) / 2` on a baroclinic pair.
pub fn p_minus_components(
    c1: &SpectralScalar,
    c2: &SpectralScalar,
) -> (SpectralScalar, SpectralScalar) {
    let i = Complex64::new(0.0, 1.0);
    let half = Complex64::new(0.5, 0.0);
    let mut o1 = c1.clone();
    let mut o2 = c2.clone();
    for ((a, b), (x, y)) in o1
        .coeffs_mut()
        .iter_mut()
        .zip(o2.coeffs_mut().iter_mut())
        .zip(c1.coeffs().iter().zip(c2.coeffs()))
    {
        *a = half * (x + i * y);
        *b = half * (y - i * x);
    }
    (o1, o2)
}

/// Oscillation projection of a real velocity: baroclinic part, then
/// `(vtilde + i vtilde_perp) / 2`.
pub fn p_plus(v: &HorizontalVelocity) -> ComplexVelocity {
    let tilde = baroclinic(v);
    let (c1, c2) = p_plus_components(&tilde.c1, &tilde.c2);
    ComplexVelocity { c1, c2 }
}

/// Conjugate-partner projection of a real velocity.
pub fn p_minus(v: &HorizontalVelocity) -> ComplexVelocity {
    let tilde = baroclinic(v);
    let (c1, c2) = p_minus_components(&tilde.c1, &tilde.c2);
    ComplexVelocity { c1, c2 }
}

/// Oscillation projection acting on an arbitrary complex pair: zero the mean
/// plane, then apply the component map. Used for the projector algebra.
pub fn p_plus_complex(u: &ComplexVelocity) -> ComplexVelocity {
    let mut t1 = u.c1.clone();
    let mut t2 = u.c2.clone();
    zero_plane_in_place(&mut t1);
    zero_plane_in_place(&mut t2);
    let (c1, c2) = p_plus_components(&t1, &t2);
    ComplexVelocity { c1, c2 }
}

pub fn p_minus_complex(u: &ComplexVelocity) -> ComplexVelocity {
    let mut t1 = u.c1.clone();
    let mut t2 = u.c2.clone();
    zero_plane_in_place(&mut t1);
    zero_plane_in_place(&mut t2);
    let (c1, c2) = p_minus_components(&t1, &t2);
    ComplexVelocity { c1, c2 }
}

/// Pointwise complex conjugate of a complex field, as a coefficient map:
/// each component becomes `conj(c(-k))`. Turns u_plus into u_minus.
pub fn field_conjugate(u: &ComplexVelocity) -> ComplexVelocity {
    ComplexVelocity {
        c1: conj_reflect(&u.c1),
        c2: conj_reflect(&u.c2),
    }
}

/// `u + conj(u)` as a real (Hermitian) baroclinic field. The caller applies
/// any oscillation phase to `u` beforehand.
pub fn realize_with_conjugate(u: &ComplexVelocity) -> BaroclinicField {
    let conj = field_conjugate(u);
    let mut c1 = u.c1.clone();
    c1.axpy(1.0, &conj.c1);
    let mut c2 = u.c2.clone();
    c2.axpy(1.0, &conj.c2);
    let mut out = BaroclinicField { c1, c2 };
    out.sanitize();
    out
}

/// Horizontal divergence of a 3D pair: `2 pi i (k1 c1 + k2 c2)`.
pub fn divergence3(c1: &SpectralScalar, c2: &SpectralScalar) -> SpectralScalar {
    let n = c1.n();
    let mut out = SpectralScalar::zeros(n);
    let two_pi = 2.0 * std::f64::consts::PI;
    {
        let o = out.coeffs_mut();
        let a = c1.coeffs();
        let b = c2.coeffs();
        for i1 in 0..n {
            let k1 = slot_to_k(i1, n) as f64;
            for i2 in 0..n {
                let k2 = slot_to_k(i2, n) as f64;
                for i3 in 0..n {
                    let idx = (i1 * n + i2) * n + i3;
                    o[idx] = Complex64::new(0.0, two_pi) * (k1 * a[idx] + k2 * b[idx]);
                }
            }
        }
    }
    out
}

/// Vertical integral of the horizontal divergence, from z = 0.
///
/// For each mode j with j3 != 0 and divergence coefficient d_j, the integral
/// contributes `d_j / (2 pi i j3)` at (j', j3) and accumulates
/// `-d_j / (2 pi i j3)` on the (j', 0) plane, which pins the integration
/// constant at z = 0. Requires the input to vanish on the k3 = 0 plane.
pub fn vertical_integral_div_components(
    c1: &SpectralScalar,
    c2: &SpectralScalar,
) -> Result<SpectralScalar, ProjectionError> {
    if c1.n() != c2.n() {
        return Err(ProjectionError::GridMismatch {
            a: c1.n(),
            b: c2.n(),
        });
    }
    let scale = c1.max_abs().max(c2.max_abs()).max(1.0);
    let residual = plane_residual_of(c1).max(plane_residual_of(c2));
    if residual > 1e-10 * scale {
        return Err(ProjectionError::NonzeroPlane { residual });
    }
    let n = c1.n();
    let mut out = SpectralScalar::zeros(n);
    {
        let o = out.coeffs_mut();
        let a = c1.coeffs();
        let b = c2.coeffs();
        for i1 in 0..n {
            let k1 = slot_to_k(i1, n) as f64;
            for i2 in 0..n {
                let k2 = slot_to_k(i2, n) as f64;
                let base = (i1 * n + i2) * n;
                for i3 in 1..n {
                    let k3 = slot_to_k(i3, n) as f64;
                    let idx = base + i3;
                    // d / (2 pi i k3) with d = 2 pi i (k1 c1 + k2 c2).
                    let val = (k1 * a[idx] + k2 * b[idx]) / k3;
                    o[idx] = val;
                    o[base] -= val;
                }
            }
        }
    }
    Ok(out)
}

pub fn vertical_integral_div(v: &BaroclinicField) -> Result<SpectralScalar, ProjectionError> {
    vertical_integral_div_components(&v.c1, &v.c2)
}

/// Vertical velocity closed by incompressibility:
/// `w = -integral_0^z div ds`, projected onto odd vertical parity.
pub fn recover_w(v: &BaroclinicField) -> Result<SpectralScalar, ProjectionError> {
    let mut w = vertical_integral_div(v)?;
    w.scale(-1.0);
    enforce_z_parity_in_place(&mut w, Parity::Odd);
    Ok(w)
}

/// Complex L2 pairing `sum_k a_k conj(b_k)`, the Parseval form of the
/// integral inner product.
pub fn l2_inner(a: &SpectralScalar, b: &SpectralScalar) -> Complex64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x * y.conj())
        .sum()
}

/// Pairing of two-component fields, summed over components.
pub fn l2_inner_pair(
    a: (&SpectralScalar, &SpectralScalar),
    b: (&SpectralScalar, &SpectralScalar),
) -> Complex64 {
    l2_inner(a.0, b.0) + l2_inner(a.1, b.1)
}

/// Real (bilinear) pairing `integral of a . b`, which in coefficients is
/// `sum_k a_k b_{-k}`. For real fields it agrees with `l2_inner`; for complex
/// fields it is the pairing under which the oscillation projections are
/// mutually adjoint.
pub fn bilinear_pairing(a: &SpectralScalar, b: &SpectralScalar) -> Complex64 {
    l2_inner(a, &conj_reflect(b))
}

pub fn bilinear_pairing_pair(
    a: (&SpectralScalar, &SpectralScalar),
    b: (&SpectralScalar, &SpectralScalar),
) -> Complex64 {
    bilinear_pairing(a.0, b.0) + bilinear_pairing(a.1, b.1)
}
