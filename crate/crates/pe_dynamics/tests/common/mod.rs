//! Shared test helpers: sparse mode dictionaries with direct convolution
//! sums, used as an independent oracle for the pseudo-spectral right-hand
//! sides, plus band-limited random state builders.
//!
//! The oracle works entirely in coefficient space: products are literal
//! double sums over mode pairs, projections are index filters, and the
//! vertical integral is the closed-form antiderivative per mode. None of it
//! touches the FFT path under test. With factors capped at |k_i| <= n/3 the
//! grid evaluation is alias-free on the retained band, so oracle and
//! implementation must agree to roundoff.

#![allow(dead_code)]

use num_complex::Complex64;
use projections::{leray2d, BarotropicField, BaroclinicField, ComplexVelocity, SpectralPlane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_core::{modes, SpectralScalar, WaveVector};
use std::collections::HashMap;

pub const TWO_PI: f64 = std::f64::consts::TAU;

type Key = (i32, i32, i32);

/// Sparse coefficient dictionary over integer modes.
#[derive(Debug, Clone, Default)]
pub struct ModeField {
    pub map: HashMap<Key, Complex64>,
}

impl ModeField {
    pub fn new() -> Self {
        ModeField {
            map: HashMap::new(),
        }
    }

    pub fn get(&self, k: Key) -> Complex64 {
        self.map.get(&k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add_term(&mut self, k: Key, value: Complex64) {
        *self.map.entry(k).or_insert(Complex64::new(0.0, 0.0)) += value;
    }

    pub fn from_scalar(f: &SpectralScalar) -> Self {
        let n = f.n();
        let mut out = ModeField::new();
        for k in modes(n) {
            let c = f.get(k);
            if c.norm_sqr() > 0.0 {
                out.add_term((k.k1, k.k2, k.k3), c);
            }
        }
        out
    }

    pub fn from_plane(p: &SpectralPlane) -> Self {
        let n = p.n();
        let mut out = ModeField::new();
        for k in modes(n) {
            if k.k3 != 0 {
                continue;
            }
            let c = p.get(k.k1, k.k2);
            if c.norm_sqr() > 0.0 {
                out.add_term((k.k1, k.k2, 0), c);
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = ModeField::new();
        for (k, c) in &self.map {
            out.add_term(*k, factor * c);
        }
        out
    }

    pub fn add(&self, other: &ModeField) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.map {
            out.add_term(*k, *c);
        }
        out
    }

    /// Derivative along axis 1, 2, or 3: multiply by 2 pi i k_axis.
    pub fn deriv(&self, axis: usize) -> Self {
        let mut out = ModeField::new();
        for (k, c) in &self.map {
            let ka = match axis {
                1 => k.0,
                2 => k.1,
                3 => k.2,
                _ => panic!("axis must be 1, 2, or 3"),
            } as f64;
            out.add_term(*k, Complex64::new(0.0, TWO_PI * ka) * c);
        }
        out
    }

    /// Full convolution: the coefficient field of the pointwise product.
    pub fn conv(&self, other: &ModeField) -> Self {
        let mut out = ModeField::new();
        for (ka, ca) in &self.map {
            for (kb, cb) in &other.map {
                out.add_term((ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2), ca * cb);
            }
        }
        out
    }

    /// Vertical-average projection: keep the k3 = 0 plane.
    pub fn p0(&self) -> Self {
        let mut out = ModeField::new();
        for (k, c) in &self.map {
            if k.2 == 0 {
                out.add_term(*k, *c);
            }
        }
        out
    }

    /// Complement of the vertical average.
    pub fn depth_part(&self) -> Self {
        let mut out = ModeField::new();
        for (k, c) in &self.map {
            if k.2 != 0 {
                out.add_term(*k, *c);
            }
        }
        out
    }

    /// Conjugate reflection: the coefficients of the pointwise complex
    /// conjugate in physical space.
    pub fn conj_reflect(&self) -> Self {
        let mut out = ModeField::new();
        for (k, c) in &self.map {
            out.add_term((-k.0, -k.1, -k.2), c.conj());
        }
        out
    }

    /// Keep the modes the truncation band retains on an n-point grid.
    pub fn truncate(&self, n: usize) -> Self {
        let keep = spectral_core::band_limit(n) as i32;
        let mut out = ModeField::new();
        for (k, c) in &self.map {
            let m = k.0.abs().max(k.1.abs()).max(k.2.abs());
            if m <= keep {
                out.add_term(*k, *c);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.map.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Closed-form vertical integral of the horizontal divergence of the
/// component pair, per mode.
pub fn oracle_vint_div(c1: &ModeField, c2: &ModeField) -> ModeField {
    let mut out = ModeField::new();
    for (which, comp) in [c1, c2].into_iter().enumerate() {
        for (k, c) in &comp.map {
            if k.2 == 0 {
                continue;
            }
            let kh = if which == 0 { k.0 } else { k.1 } as f64;
            let val = c * kh / k.2 as f64;
            out.add_term(*k, val);
            out.add_term((k.0, k.1, 0), -val);
        }
    }
    out
}

/// Horizontal divergence of the component pair.
pub fn oracle_div(c1: &ModeField, c2: &ModeField) -> ModeField {
    c1.deriv(1).add(&c2.deriv(2))
}

/// `a . grad b_i` as a convolution sum, for horizontal `a`.
pub fn oracle_advect(a: &[ModeField; 2], b_i: &ModeField) -> ModeField {
    a[0].conv(&b_i.deriv(1)).add(&a[1].conv(&b_i.deriv(2)))
}

/// Mean-flow self-advection with the pressure projection:
/// `-P_h(vbar . grad vbar)`, truncated to the retained band.
pub fn oracle_euler2d(vbar: &[ModeField; 2], n: usize) -> [ModeField; 2] {
    let raw = [
        oracle_advect(vbar, &vbar[0]).truncate(n),
        oracle_advect(vbar, &vbar[1]).truncate(n),
    ];
    oracle_leray_negate(&raw)
}

/// Apply mean removal, the horizontal pressure projection, and an overall
/// sign flip to a plane pair.
pub fn oracle_leray_negate(planes: &[ModeField; 2]) -> [ModeField; 2] {
    let mut out = [ModeField::new(), ModeField::new()];
    let keys: std::collections::HashSet<Key> = planes[0]
        .map
        .keys()
        .chain(planes[1].map.keys())
        .copied()
        .collect();
    for k in keys {
        assert_eq!(k.2, 0, "plane field carries a depth mode");
        if k.0 == 0 && k.1 == 0 {
            continue;
        }
        let phi = (planes[0].get(k), planes[1].get(k));
        let k1 = k.0 as f64;
        let k2 = k.1 as f64;
        let kk = k1 * k1 + k2 * k2;
        let dot = (phi.0 * k1 + phi.1 * k2) / kk;
        out[0].add_term(k, -(phi.0 - dot * k1));
        out[1].add_term(k, -(phi.1 - dot * k2));
    }
    out
}

/// The transport group `a . grad b - P0(a . grad b + (div a) b)
/// - (int div a) d3 b`, component `i`, as convolution sums.
pub fn oracle_transport_group(a: &[ModeField; 2], b: &[ModeField; 2], i: usize) -> ModeField {
    let adv = oracle_advect(a, &b[i]);
    let diva = oracle_div(&a[0], &a[1]);
    let vint = oracle_vint_div(&a[0], &a[1]);
    let p0_part = adv.add(&diva.conv(&b[i])).p0();
    adv.add(&p0_part.scale(Complex64::new(-1.0, 0.0)))
        .add(&vint.conv(&b[i].deriv(3)).scale(Complex64::new(-1.0, 0.0)))
}

/// The depth-averaged baroclinic source `P0((div a) a_i + a . grad a_i)`.
pub fn oracle_mean_source(a: &[ModeField; 2], i: usize) -> ModeField {
    oracle_div(&a[0], &a[1])
        .conv(&a[i])
        .add(&oracle_advect(a, &a[i]))
        .p0()
}

/// Split-form mean-flow tendency by direct sums.
pub fn oracle_rhs_bar(vbar: &[ModeField; 2], vtilde: &[ModeField; 2], n: usize) -> [ModeField; 2] {
    let raw = [
        oracle_advect(vbar, &vbar[0])
            .add(&oracle_mean_source(vtilde, 0))
            .truncate(n),
        oracle_advect(vbar, &vbar[1])
            .add(&oracle_mean_source(vtilde, 1))
            .truncate(n),
    ];
    oracle_leray_negate(&raw)
}

/// Split-form depth-varying tendency by direct sums.
pub fn oracle_rhs_tilde(
    vbar: &[ModeField; 2],
    vtilde: &[ModeField; 2],
    omega: f64,
    n: usize,
) -> [ModeField; 2] {
    let diva = oracle_div(&vtilde[0], &vtilde[1]);
    let vint = oracle_vint_div(&vtilde[0], &vtilde[1]);
    let mut out = Vec::with_capacity(2);
    for i in 0..2 {
        let self_adv = oracle_advect(vtilde, &vtilde[i]);
        let shear = oracle_advect(vtilde, &vbar[i]);
        let sweep = oracle_advect(vbar, &vtilde[i]);
        let p0_back = self_adv.add(&diva.conv(&vtilde[i])).p0();
        let vertical = vint.conv(&vtilde[i].deriv(3));
        let perp_i = if i == 0 {
            vtilde[1].scale(Complex64::new(-1.0, 0.0))
        } else {
            vtilde[0].clone()
        };
        let total = self_adv
            .add(&shear)
            .add(&sweep)
            .scale(Complex64::new(-1.0, 0.0))
            .add(&p0_back)
            .add(&vertical)
            .add(&perp_i.scale(Complex64::new(-omega, 0.0)));
        // The structural cancellation keeps the tendency off the plane;
        // enforce that exactly like the implementation does.
        out.push(total.truncate(n).depth_part());
    }
    [out.remove(0), out.remove(0)]
}

/// Oscillatory-form tendencies by direct sums with explicit phase factors.
pub fn oracle_rhs_osc(
    vbar: &[ModeField; 2],
    uplus: &[ModeField; 2],
    omega: f64,
    t: f64,
    n: usize,
) -> ([ModeField; 2], [ModeField; 2]) {
    let theta = omega * t;
    let e1 = Complex64::from_polar(1.0, theta);
    let em1 = e1.conj();
    let e2 = Complex64::from_polar(1.0, 2.0 * theta);
    let em2 = e2.conj();
    let uminus = [uplus[0].conj_reflect(), uplus[1].conj_reflect()];

    // w = vbar + i vbar_perp, componentwise.
    let i_unit = Complex64::new(0.0, 1.0);
    let w = [
        vbar[0].add(&vbar[1].scale(-i_unit)),
        vbar[1].add(&vbar[0].scale(i_unit)),
    ];

    let mut du = Vec::with_capacity(2);
    for i in 0..2 {
        let self_group = oracle_transport_group(&uplus, &uplus, i);
        let cross_group = oracle_transport_group(&uminus, &uplus, i);
        let sweep = oracle_advect(vbar, &uplus[i]);
        let into_w_plus = oracle_advect(&uplus, &w[i]).scale(Complex64::new(0.5, 0.0));
        let into_w_minus = oracle_advect(&uminus, &w[i]).scale(Complex64::new(0.5, 0.0));
        let total = self_group
            .scale(e1)
            .add(&sweep)
            .add(&into_w_plus)
            .add(&cross_group.scale(em1))
            .add(&into_w_minus.scale(em2))
            .scale(Complex64::new(-1.0, 0.0));
        du.push(total.truncate(n).depth_part());
    }

    let raw = [
        oracle_advect(vbar, &vbar[0])
            .add(&oracle_mean_source(&uplus, 0).scale(e2))
            .add(&oracle_mean_source(&uminus, 0).scale(em2))
            .truncate(n),
        oracle_advect(vbar, &vbar[1])
            .add(&oracle_mean_source(&uplus, 1).scale(e2))
            .add(&oracle_mean_source(&uminus, 1).scale(em2))
            .truncate(n),
    ];
    let dbar = oracle_leray_negate(&raw);
    ([dbar[0].clone(), dbar[1].clone()], [du.remove(0), du.remove(0)])
}

/// Largest coefficient difference between an oracle field and a computed
/// spectral field, over every representable mode.
pub fn diff_scalar(oracle: &ModeField, computed: &SpectralScalar) -> f64 {
    let n = computed.n();
    let mut worst: f64 = 0.0;
    for k in modes(n) {
        let d = (oracle.get((k.k1, k.k2, k.k3)) - computed.get(k)).norm();
        worst = worst.max(d);
    }
    worst
}

pub fn diff_plane(oracle: &ModeField, computed: &SpectralPlane) -> f64 {
    let n = computed.n();
    let mut worst: f64 = 0.0;
    for k in modes(n) {
        if k.k3 != 0 {
            continue;
        }
        let d = (oracle.get((k.k1, k.k2, 0)) - computed.get(k.k1, k.k2)).norm();
        worst = worst.max(d);
    }
    worst
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random real, even, plane-free depth-varying velocity with modes capped
/// at |k_i| <= cap.
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

/// Random divergence-free mean flow with modes capped at |k_i| <= cap.
pub fn random_bar(n: usize, cap: i32, seed: u64) -> BarotropicField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p1 = SpectralPlane::zeros(n);
    let mut p2 = SpectralPlane::zeros(n);
    for comp in [&mut p1, &mut p2] {
        for k1 in -cap..=cap {
            for k2 in -cap..=cap {
                if k1 == 0 && k2 == 0 {
                    continue;
                }
                comp.set(k1, k2, 0.3 * random_coeff(&mut rng));
            }
        }
        comp.enforce_hermitian();
        comp.set_mean_zero();
    }
    let mut out = leray2d(&p1, &p2).expect("mean already removed");
    out.sanitize();
    out
}

/// Random oscillation variable: the positive projection of a random real
/// depth-varying field, optionally rotated by a phase.
pub fn random_uplus(n: usize, cap: i32, seed: u64, phase: f64) -> ComplexVelocity {
    let tilde = random_tilde(n, cap, seed);
    let (c1, c2) = projections::p_plus_components(&tilde.c1, &tilde.c2);
    let mut out = ComplexVelocity { c1, c2 };
    out.scale_complex(Complex64::from_polar(1.0, phase));
    out
}

pub fn bar_views(v: &BarotropicField) -> [ModeField; 2] {
    [ModeField::from_plane(&v.c1), ModeField::from_plane(&v.c2)]
}

pub fn tilde_views(v: &BaroclinicField) -> [ModeField; 2] {
    [ModeField::from_scalar(&v.c1), ModeField::from_scalar(&v.c2)]
}

pub fn complex_views(v: &ComplexVelocity) -> [ModeField; 2] {
    [ModeField::from_scalar(&v.c1), ModeField::from_scalar(&v.c2)]
}

/// Energy of the assembled velocity: squared coefficient sums of both
/// components.
pub fn total_energy(vbar: &BarotropicField, vtilde: &BaroclinicField) -> f64 {
    let v = projections::assemble(vbar, vtilde);
    let mut e = 0.0;
    for comp in [&v.comp1, &v.comp2] {
        for c in comp.coeffs() {
            e += c.norm_sqr();
        }
    }
    e
}

pub fn max_coeff_scale(fields: &[&SpectralScalar]) -> f64 {
    fields.iter().map(|f| f.max_abs()).fold(1e-30, f64::max)
}
