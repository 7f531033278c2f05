//! Pseudo-spectral product assembly shared by both formulations.
//!
//! All nonlinear terms are evaluated pointwise in physical space and
//! transformed back with the 2/3-rule truncation, so coefficients inside the
//! retained band are exact convolutions of band-limited inputs. Vertical
//! averages (the P0 projection) are taken as column means in physical space,
//! which is the same projection expressed before the transform.

use num_complex::Complex64;
use projections::{
    vertical_integral_div_components, BarotropicField, PlaneAxis, ProjectionError, SpectralPlane,
};
use spectral_core::{
    dealias_in_place, fft2, forward_transform_complex, inverse_transform_complex, Axis,
    SpectralScalar,
};

/// Physical samples of a coefficient field. Complex-valued so the same path
/// serves real fields and the oscillation variables.
pub(crate) fn phys(f: &SpectralScalar) -> Vec<Complex64> {
    inverse_transform_complex(f)
}

/// Transform physical samples back and truncate to the dealiased band.
pub(crate) fn to_spec(vals: &[Complex64], n: usize) -> SpectralScalar {
    let mut s = forward_transform_complex(vals, n).expect("sample count fixed by caller");
    dealias_in_place(&mut s);
    s
}

/// Column means over the vertical index: the physical-space form of the
/// vertical-average projection.
pub(crate) fn column_means(vals: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i12 in 0..n * n {
        let base = i12 * n;
        let mut acc = Complex64::new(0.0, 0.0);
        for i3 in 0..n {
            acc += vals[base + i3];
        }
        out[i12] = acc / n as f64;
    }
    out
}

/// Coefficient plane of complex 2D samples, dealiased.
pub(crate) fn plane_from_complex_values(vals: &[Complex64], n: usize) -> SpectralPlane {
    let mut plane = SpectralPlane::zeros(n);
    plane.coeffs_mut().copy_from_slice(vals);
    fft2(plane.coeffs_mut(), n, true);
    plane.dealias_in_place();
    plane
}

/// Physical arrays derived from one two-component 3D field: the components,
/// their horizontal and vertical derivatives, the horizontal divergence, and
/// the vertical integral of the divergence. This is everything the nonlinear
/// terms consume.
pub(crate) struct FieldKit {
    pub n: usize,
    pub c: [Vec<Complex64>; 2],
    pub d1: [Vec<Complex64>; 2],
    pub d2: [Vec<Complex64>; 2],
    pub d3: [Vec<Complex64>; 2],
    pub div: Vec<Complex64>,
    pub vint: Vec<Complex64>,
}

impl FieldKit {
    /// Build from spectral components with a vanishing k3 = 0 plane.
    pub fn new(c1: &SpectralScalar, c2: &SpectralScalar) -> Result<FieldKit, ProjectionError> {
        let n = c1.n();
        let div = projections::divergence3(c1, c2);
        let vint = vertical_integral_div_components(c1, c2)?;
        Ok(FieldKit {
            n,
            c: [phys(c1), phys(c2)],
            d1: [
                phys(&spectral_core::derivative(c1, Axis::X1)),
                phys(&spectral_core::derivative(c2, Axis::X1)),
            ],
            d2: [
                phys(&spectral_core::derivative(c1, Axis::X2)),
                phys(&spectral_core::derivative(c2, Axis::X2)),
            ],
            d3: [
                phys(&spectral_core::derivative(c1, Axis::X3)),
                phys(&spectral_core::derivative(c2, Axis::X3)),
            ],
            div: phys(&div),
            vint: phys(&vint),
        })
    }

    /// The kit of the pointwise conjugate field. Conjugation commutes with
    /// every coordinate derivative and with the vertical integral, so the
    /// arrays are conjugated entrywise.
    pub fn conjugate(&self) -> FieldKit {
        let conj_vec = |v: &Vec<Complex64>| v.iter().map(|c| c.conj()).collect::<Vec<_>>();
        FieldKit {
            n: self.n,
            c: [conj_vec(&self.c[0]), conj_vec(&self.c[1])],
            d1: [conj_vec(&self.d1[0]), conj_vec(&self.d1[1])],
            d2: [conj_vec(&self.d2[0]), conj_vec(&self.d2[1])],
            d3: [conj_vec(&self.d3[0]), conj_vec(&self.d3[1])],
            div: conj_vec(&self.div),
            vint: conj_vec(&self.vint),
        }
    }
}

/// Physical arrays of the mean-plane flow and its horizontal derivatives.
pub(crate) struct PlaneKit {
    pub c: [Vec<f64>; 2],
    pub d1: [Vec<f64>; 2],
    pub d2: [Vec<f64>; 2],
}

impl PlaneKit {
    pub fn new(vbar: &BarotropicField) -> PlaneKit {
        PlaneKit {
            c: [vbar.c1.values(), vbar.c2.values()],
            d1: [
                vbar.c1.derivative(PlaneAxis::X1).values(),
                vbar.c2.derivative(PlaneAxis::X1).values(),
            ],
            d2: [
                vbar.c1.derivative(PlaneAxis::X2).values(),
                vbar.c2.derivative(PlaneAxis::X2).values(),
            ],
        }
    }
}

/// `a . grad b` for component `i` at one sample.
#[inline]
pub(crate) fn advect_at(a: &FieldKit, b: &FieldKit, i: usize, idx: usize) -> Complex64 {
    a.c[0][idx] * b.d1[i][idx] + a.c[1][idx] * b.d2[i][idx]
}

/// Self-advection of the mean flow as two pre-projection product planes.
pub(crate) fn advection_planes(vbar: &BarotropicField) -> (SpectralPlane, SpectralPlane) {
    let n = vbar.n();
    let kit = PlaneKit::new(vbar);
    let mut a1 = vec![0.0; n * n];
    let mut a2 = vec![0.0; n * n];
    for idx in 0..n * n {
        a1[idx] = kit.c[0][idx] * kit.d1[0][idx] + kit.c[1][idx] * kit.d2[0][idx];
        a2[idx] = kit.c[0][idx] * kit.d1[1][idx] + kit.c[1][idx] * kit.d2[1][idx];
    }
    let mut p1 = SpectralPlane::from_values(&a1, n);
    let mut p2 = SpectralPlane::from_values(&a2, n);
    p1.dealias_in_place();
    p2.dealias_in_place();
    (p1, p2)
}

/// The transport group `a . grad b - P0(a . grad b + (div a) b)
/// - (int_0^z div a) dz_b`, all three components of the oscillatory
/// nonlinearity, returned as physical arrays for component `i`. The P0 part
/// is subtracted as a column mean, which cancels the plane exactly.
pub(crate) fn transport_group(a: &FieldKit, b: &FieldKit, i: usize) -> Vec<Complex64> {
    let n = a.n;
    let size = n * n * n;
    let mut out = vec![Complex64::new(0.0, 0.0); size];
    let mut colmean = vec![Complex64::new(0.0, 0.0); n * n];
    for i12 in 0..n * n {
        let base = i12 * n;
        let mut acc = Complex64::new(0.0, 0.0);
        for i3 in 0..n {
            let idx = base + i3;
            acc += advect_at(a, b, i, idx) + a.div[idx] * b.c[i][idx];
        }
        colmean[i12] = acc / n as f64;
    }
    for i12 in 0..n * n {
        let base = i12 * n;
        for i3 in 0..n {
            let idx = base + i3;
            out[idx] = advect_at(a, b, i, idx) - colmean[i12] - a.vint[idx] * b.d3[i][idx];
        }
    }
    out
}

/// `P0((div a) a + a . grad a)` of a two-component field, as a dealiased
/// coefficient plane per component: the baroclinic source feeding the mean
/// flow.
pub(crate) fn mean_flow_source(kit: &FieldKit) -> (SpectralPlane, SpectralPlane) {
    let n = kit.n;
    let mut planes = Vec::with_capacity(2);
    for i in 0..2 {
        let mut vals = vec![Complex64::new(0.0, 0.0); n * n * n];
        for idx in 0..n * n * n {
            vals[idx] = kit.div[idx] * kit.c[i][idx] + advect_at(kit, kit, i, idx);
        }
        let colmean = column_means(&vals, n);
        planes.push(plane_from_complex_values(&colmean, n));
    }
    let p2 = planes.pop().unwrap();
    let p1 = planes.pop().unwrap();
    (p1, p2)
}
