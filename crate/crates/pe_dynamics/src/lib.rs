//! Right-hand sides and time integration for the rotating inviscid
//! primitive equations in two equivalent forms.
//!
//! The split form evolves the mean-plane flow together with the real
//! depth-varying velocity and carries the rotation term explicitly. The
//! oscillatory form evolves the complex variable
//! `u_plus = e^{-i omega t} (vtilde + i vtilde_perp) / 2`, which absorbs the
//! rotation into explicit phase factors evaluated exactly at stage times, so
//! the step size never needs to resolve the rotation rate itself.

mod products;

use num_complex::Complex64;
use products::{advection_planes, mean_flow_source, to_spec, transport_group, FieldKit, PlaneKit};
use projections::{
    field_conjugate, leray2d, p_plus_components, realize_with_conjugate, BarotropicField,
    BaroclinicField, ComplexVelocity, ProjectionError, SpectralPlane,
};
use spectral_core::{
    enforce_z_parity_in_place, inverse_transform, slot_to_k, Axis, Parity, SpectralError,
    SpectralScalar,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PeError {
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("{what} residual {residual:.3e} exceeds tolerance at t = {t}")]
    InvariantViolation {
        what: &'static str,
        residual: f64,
        t: f64,
    },
    #[error("bad integration options: {0}")]
    BadOptions(String),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// State of the split formulation.
#[derive(Debug, Clone)]
pub struct PEState {
    pub vbar: BarotropicField,
    pub vtilde: BaroclinicField,
    pub t: f64,
}

impl PEState {
    pub fn n(&self) -> usize {
        self.vbar.n()
    }

    /// Re-enforce the invariant set: Hermitian symmetry, zero means,
    /// divergence-free mean flow, even vertical parity, zero mean plane.
    pub fn sanitize(&mut self) -> Result<(), PeError> {
        self.vbar.sanitize();
        self.vbar = leray2d(&self.vbar.c1, &self.vbar.c2)?;
        self.vtilde.sanitize();
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.vbar.is_finite() && self.vtilde.is_finite()
    }
}

/// State of the oscillatory formulation. `omega` travels with the state
/// because the phase factors depend on it.
#[derive(Debug, Clone)]
pub struct OscState {
    pub vbar: BarotropicField,
    pub uplus: ComplexVelocity,
    pub t: f64,
    pub omega: f64,
}

impl OscState {
    pub fn n(&self) -> usize {
        self.vbar.n()
    }

    pub fn sanitize(&mut self) -> Result<(), PeError> {
        self.vbar.sanitize();
        self.vbar = leray2d(&self.vbar.c1, &self.vbar.c2)?;
        self.uplus.zero_plane();
        enforce_z_parity_in_place(&mut self.uplus.c1, Parity::Even);
        enforce_z_parity_in_place(&mut self.uplus.c2, Parity::Even);
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.vbar.is_finite() && self.uplus.is_finite()
    }
}

/// Self-advection tendency of the mean flow: `-P_h(vbar . grad vbar)`. This
/// is the full 2D Euler right-hand side and is shared verbatim with the
/// limit system so cross-model comparisons carry no discretization mismatch.
pub fn advect_barotropic(vbar: &BarotropicField) -> Result<BarotropicField, PeError> {
    let (mut a1, mut a2) = advection_planes(vbar);
    a1.set_mean_zero();
    a2.set_mean_zero();
    let mut out = leray2d(&a1, &a2)?;
    out.scale(-1.0);
    Ok(out)
}

fn bar_tendency_from(vbar: &BarotropicField, tilde_kit: &FieldKit) -> Result<BarotropicField, PeError> {
    let (mut a1, mut a2) = advection_planes(vbar);
    let (s1, s2) = mean_flow_source(tilde_kit);
    a1.axpy(1.0, &s1);
    a2.axpy(1.0, &s2);
    a1.set_mean_zero();
    a2.set_mean_zero();
    let mut out = leray2d(&a1, &a2)?;
    out.scale(-1.0);
    Ok(out)
}

fn tilde_tendency_from(
    plane_kit: &PlaneKit,
    tilde_kit: &FieldKit,
    vtilde: &BaroclinicField,
    omega: f64,
) -> BaroclinicField {
    let n = tilde_kit.n;
    let size = n * n * n;
    let mut comps: Vec<SpectralScalar> = Vec::with_capacity(2);
    for i in 0..2 {
        // Leading part: -(self-advection + shear + sweep) + vertical term,
        // with the vertical average of (self-advection + divergence product)
        // added back as a column mean.
        let mut vals = vec![Complex64::new(0.0, 0.0); size];
        let mut colmean = vec![Complex64::new(0.0, 0.0); n * n];
        for i12 in 0..n * n {
            let base = i12 * n;
            let mut acc = Complex64::new(0.0, 0.0);
            for i3 in 0..n {
                let idx = base + i3;
                let self_adv = products::advect_at(tilde_kit, tilde_kit, i, idx);
                acc += self_adv + tilde_kit.div[idx] * tilde_kit.c[i][idx];
            }
            colmean[i12] = acc / n as f64;
        }
        for i12 in 0..n * n {
            let base = i12 * n;
            for i3 in 0..n {
                let idx = base + i3;
                let self_adv = products::advect_at(tilde_kit, tilde_kit, i, idx);
                let shear = tilde_kit.c[0][idx] * plane_kit.d1[i][i12]
                    + tilde_kit.c[1][idx] * plane_kit.d2[i][i12];
                let sweep = plane_kit.c[0][i12] * tilde_kit.d1[i][idx]
                    + plane_kit.c[1][i12] * tilde_kit.d2[i][idx];
                let vertical = tilde_kit.vint[idx] * tilde_kit.d3[i][idx];
                vals[idx] = -(self_adv + shear + sweep) + colmean[i12] + vertical;
            }
        }
        comps.push(to_spec(&vals, n));
    }
    let c2 = comps.pop().unwrap();
    let c1 = comps.pop().unwrap();
    let mut out = BaroclinicField { c1, c2 };
    // Rotation: -omega * vtilde_perp, exact in coefficients.
    out.axpy(-omega, &vtilde.perp());
    // The vertical average of the assembled tendency cancels structurally;
    // clear the roundoff that is left of it.
    zero_plane(&mut out);
    out
}

fn zero_plane(v: &mut BaroclinicField) {
    for comp in [&mut v.c1, &mut v.c2] {
        let n = comp.n();
        let coeffs = comp.coeffs_mut();
        for i12 in 0..n * n {
            coeffs[i12 * n] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Tendency of the mean flow in the split formulation:
/// `-P_h(vbar . grad vbar) - P_h P0((div vtilde) vtilde + vtilde . grad vtilde)`.
pub fn rhs_barotropic(
    vbar: &BarotropicField,
    vtilde: &BaroclinicField,
) -> Result<BarotropicField, PeError> {
    let kit = FieldKit::new(&vtilde.c1, &vtilde.c2)?;
    bar_tendency_from(vbar, &kit)
}

/// Tendency of the depth-varying flow in the split formulation.
pub fn rhs_baroclinic(
    vbar: &BarotropicField,
    vtilde: &BaroclinicField,
    omega: f64,
) -> Result<BaroclinicField, PeError> {
    let tilde_kit = FieldKit::new(&vtilde.c1, &vtilde.c2)?;
    let plane_kit = PlaneKit::new(vbar);
    Ok(tilde_tendency_from(&plane_kit, &tilde_kit, vtilde, omega))
}

/// Both split-form tendencies sharing one set of transforms.
pub fn rhs_pe(
    vbar: &BarotropicField,
    vtilde: &BaroclinicField,
    omega: f64,
) -> Result<(BarotropicField, BaroclinicField), PeError> {
    let tilde_kit = FieldKit::new(&vtilde.c1, &vtilde.c2)?;
    let plane_kit = PlaneKit::new(vbar);
    let bar = bar_tendency_from(vbar, &tilde_kit)?;
    let tilde = tilde_tendency_from(&plane_kit, &tilde_kit, vtilde, omega);
    Ok((bar, tilde))
}

/// Tendencies of the oscillatory formulation at the state's own time.
///
/// The u_plus equation groups the nonlinearity by oscillation frequency:
/// self-interaction carries `e^{i omega t}`, the conjugate-partner transport
/// carries `e^{-i omega t}`, the mean-flow exchange is resonant, and the
/// conjugate mean-flow exchange carries `e^{-2 i omega t}`. The mean flow
/// sees the two `e^{+-2 i omega t}` baroclinic sources; the mixed term is a
/// pure horizontal gradient annihilated by the Leray projection and is
/// omitted by construction.
pub fn rhs_osc(state: &OscState) -> Result<(BarotropicField, ComplexVelocity), PeError> {
    let n = state.n();
    let size = n * n * n;
    let theta = state.omega * state.t;
    let e1 = Complex64::from_polar(1.0, theta);
    let em1 = e1.conj();
    let e2 = Complex64::from_polar(1.0, 2.0 * theta);
    let em2 = e2.conj();

    let ukit = FieldKit::new(&state.uplus.c1, &state.uplus.c2)?;
    let mkit = ukit.conjugate();
    let pkit = PlaneKit::new(&state.vbar);

    // Horizontal gradients of w = vbar + i vbar_perp, on the plane.
    let wd = |j: usize, i: usize, i12: usize| -> Complex64 {
        let (dv1, dv2) = if j == 1 {
            (pkit.d1[0][i12], pkit.d1[1][i12])
        } else {
            (pkit.d2[0][i12], pkit.d2[1][i12])
        };
        if i == 0 {
            Complex64::new(dv1, -dv2)
        } else {
            Complex64::new(dv2, dv1)
        }
    };

    let mut comps: Vec<SpectralScalar> = Vec::with_capacity(2);
    for i in 0..2 {
        let self_group = transport_group(&ukit, &ukit, i);
        let cross_group = transport_group(&mkit, &ukit, i);
        let mut vals = vec![Complex64::new(0.0, 0.0); size];
        for i12 in 0..n * n {
            let base = i12 * n;
            for i3 in 0..n {
                let idx = base + i3;
                let sweep = pkit.c[0][i12] * ukit.d1[i][idx] + pkit.c[1][i12] * ukit.d2[i][idx];
                let into_w_plus = 0.5
                    * (ukit.c[0][idx] * wd(1, i, i12) + ukit.c[1][idx] * wd(2, i, i12));
                let into_w_minus = 0.5
                    * (mkit.c[0][idx] * wd(1, i, i12) + mkit.c[1][idx] * wd(2, i, i12));
                let resonant = sweep + into_w_plus;
                vals[idx] = -(e1 * self_group[idx]
                    + resonant
                    + em1 * cross_group[idx]
                    + em2 * into_w_minus);
            }
        }
        comps.push(to_spec(&vals, n));
    }
    let c2 = comps.pop().unwrap();
    let c1 = comps.pop().unwrap();
    let mut du = ComplexVelocity { c1, c2 };
    du.zero_plane();

    // Mean flow: 2D self-advection plus the phase-carrying baroclinic
    // sources from u_plus and its conjugate partner.
    let (mut a1, mut a2) = advection_planes(&state.vbar);
    let (sp1, sp2) = mean_flow_source(&ukit);
    let (sm1, sm2) = mean_flow_source(&mkit);
    a1.axpy_complex(e2, &sp1);
    a2.axpy_complex(e2, &sp2);
    a1.axpy_complex(em2, &sm1);
    a2.axpy_complex(em2, &sm2);
    a1.set_mean_zero();
    a2.set_mean_zero();
    let mut dbar = leray2d(&a1, &a2)?;
    dbar.scale(-1.0);

    Ok((dbar, du))
}

/// Exact solution of the rotation-only dynamics: the mean flow is frozen and
/// the depth-varying part rotates with angle `omega t`.
pub fn linear_rotation_solution(initial: &PEState, omega: f64, t: f64) -> PEState {
    PEState {
        vbar: initial.vbar.clone(),
        vtilde: rotate_baroclinic(&initial.vtilde, omega * t),
        t: initial.t + t,
    }
}

/// Apply the rotation matrix with entries (cos, sin; -sin, cos) to the
/// component pair.
pub fn rotate_baroclinic(v: &BaroclinicField, angle: f64) -> BaroclinicField {
    let (s, c) = angle.sin_cos();
    let mut c1 = v.c1.clone();
    c1.scale(c);
    c1.axpy(s, &v.c2);
    let mut c2 = v.c2.clone();
    c2.scale(c);
    c2.axpy(-s, &v.c1);
    BaroclinicField { c1, c2 }
}

/// Oscillatory view of a split state: `u_plus = e^{-i omega t} P_+ vtilde`.
pub fn osc_from_pe(state: &PEState, omega: f64) -> OscState {
    let (c1, c2) = p_plus_components(&state.vtilde.c1, &state.vtilde.c2);
    let mut uplus = ComplexVelocity { c1, c2 };
    uplus.scale_complex(Complex64::from_polar(1.0, -omega * state.t));
    OscState {
        vbar: state.vbar.clone(),
        uplus,
        t: state.t,
        omega,
    }
}

/// Real reconstruction `vtilde = u_plus e^{i omega t} + conjugate`.
pub fn reconstruct_tilde(state: &OscState) -> BaroclinicField {
    let mut up = state.uplus.clone();
    up.scale_complex(Complex64::from_polar(1.0, state.omega * state.t));
    realize_with_conjugate(&up)
}

pub fn pe_from_osc(state: &OscState) -> PEState {
    PEState {
        vbar: state.vbar.clone(),
        vtilde: reconstruct_tilde(state),
        t: state.t,
    }
}

/// How far the reconstructed field is from being real, before any symmetry
/// enforcement. Stays at roundoff level while the integration is healthy.
pub fn reconstruction_residual(state: &OscState) -> f64 {
    let mut up = state.uplus.clone();
    up.scale_complex(Complex64::from_polar(1.0, state.omega * state.t));
    let conj = field_conjugate(&up);
    let mut s1 = up.c1.clone();
    s1.axpy(1.0, &conj.c1);
    let mut s2 = up.c2.clone();
    s2.axpy(1.0, &conj.c2);
    s1.hermitian_residual().max(s2.hermitian_residual())
}

/// CFL-style default step from the initial state: half a grid spacing per
/// unit of the largest velocity.
pub fn suggested_dt(state: &PEState) -> Result<f64, PeError> {
    let n = state.n();
    let v = projections::assemble(&state.vbar, &state.vtilde);
    let mut vmax: f64 = 0.0;
    for comp in [&v.comp1, &v.comp2] {
        for x in inverse_transform(comp)? {
            vmax = vmax.max(x.abs());
        }
    }
    Ok(0.5 * (1.0 / n as f64) / vmax.max(1.0))
}

#[derive(Debug, Clone, Copy)]
pub struct BlowupThresholds {
    /// Flag when the largest gradient grows by this factor.
    pub gradient_amplification: f64,
    /// Flag when the top retained shell holds this fraction of the energy.
    pub tail_fraction: f64,
}

impl Default for BlowupThresholds {
    fn default() -> Self {
        BlowupThresholds {
            gradient_amplification: 100.0,
            tail_fraction: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BlowupEvent {
    pub t: f64,
    pub criterion: String,
    pub value: f64,
}

/// Gradient-amplification and spectral-tail indicators of an impending
/// singularity. Both are proxies: the monitor reports, it does not prove.
#[derive(Debug, Clone)]
pub struct BlowupMonitor {
    thresholds: BlowupThresholds,
    baseline_gradient: f64,
}

fn max_abs_gradient(state: &PEState) -> Result<f64, PeError> {
    // Largest |d v1 / d x1| over the grid, the shock-forming direction of
    // the blowup data.
    let mut comp1 = state.vbar.c1.broadcast();
    comp1.axpy(1.0, &state.vtilde.c1);
    let d = spectral_core::derivative(&comp1, Axis::X1);
    let mut worst: f64 = 0.0;
    for x in inverse_transform(&d)? {
        worst = worst.max(x.abs());
    }
    Ok(worst)
}

fn tail_energy_fraction(state: &PEState) -> f64 {
    let n = state.n();
    let top = spectral_core::band_limit(n) as i32;
    let v = projections::assemble(&state.vbar, &state.vtilde);
    let mut tail = 0.0;
    let mut total = 0.0;
    for comp in [&v.comp1, &v.comp2] {
        let coeffs = comp.coeffs();
        for i1 in 0..n {
            let k1 = slot_to_k(i1, n).abs();
            for i2 in 0..n {
                let k2 = slot_to_k(i2, n).abs();
                for i3 in 0..n {
                    let k3 = slot_to_k(i3, n).abs();
                    let e = coeffs[(i1 * n + i2) * n + i3].norm_sqr();
                    total += e;
                    if k1.max(k2).max(k3) == top {
                        tail += e;
                    }
                }
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

impl BlowupMonitor {
    pub fn new(initial: &PEState, thresholds: BlowupThresholds) -> Result<Self, PeError> {
        Ok(BlowupMonitor {
            thresholds,
            baseline_gradient: max_abs_gradient(initial)?.max(f64::MIN_POSITIVE),
        })
    }

    pub fn gradient_amplification(&self, state: &PEState) -> Result<f64, PeError> {
        Ok(max_abs_gradient(state)? / self.baseline_gradient)
    }

    pub fn tail_fraction(&self, state: &PEState) -> f64 {
        tail_energy_fraction(state)
    }

    pub fn check(&self, state: &PEState) -> Result<Option<BlowupEvent>, PeError> {
        let amp = self.gradient_amplification(state)?;
        if amp >= self.thresholds.gradient_amplification {
            return Ok(Some(BlowupEvent {
                t: state.t,
                criterion: "gradient-amplification".into(),
                value: amp,
            }));
        }
        let tail = self.tail_fraction(state);
        if tail >= self.thresholds.tail_fraction {
            return Ok(Some(BlowupEvent {
                t: state.t,
                criterion: "spectral-tail".into(),
                value: tail,
            }));
        }
        Ok(None)
    }
}

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Observer cadence in steps; the initial and final states are always
    /// reported.
    pub stride: usize,
    /// When false, only the rotation term acts (the linear system).
    pub nonlinear: bool,
    /// Optional high-order exponential spectral filter, off by default and
    /// off in every verification scenario.
    pub filter: bool,
    pub monitor: Option<BlowupThresholds>,
}

impl IntegrateOptions {
    pub fn new(dt: f64, t_end: f64) -> Self {
        IntegrateOptions {
            dt,
            t_end,
            stride: 1,
            nonlinear: true,
            filter: false,
            monitor: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum StopReason {
    Completed,
    Blowup(BlowupEvent),
}

fn filter_scalar(f: &mut SpectralScalar) {
    let n = f.n();
    let cutoff = spectral_core::band_limit(n) as f64;
    let coeffs = f.coeffs_mut();
    for i1 in 0..n {
        let k1 = slot_to_k(i1, n).abs() as f64;
        for i2 in 0..n {
            let k2 = slot_to_k(i2, n).abs() as f64;
            for i3 in 0..n {
                let k3 = slot_to_k(i3, n).abs() as f64;
                let rho = (k1.max(k2).max(k3) / cutoff).min(1.0);
                coeffs[(i1 * n + i2) * n + i3] *= (-36.0 * rho.powi(36)).exp();
            }
        }
    }
}

fn filter_plane(p: &mut SpectralPlane) {
    let n = p.n();
    let cutoff = spectral_core::band_limit(n) as f64;
    let coeffs = p.coeffs_mut();
    for i1 in 0..n {
        let k1 = slot_to_k(i1, n).abs() as f64;
        for i2 in 0..n {
            let k2 = slot_to_k(i2, n).abs() as f64;
            let rho = (k1.max(k2) / cutoff).min(1.0);
            coeffs[i1 * n + i2] *= (-36.0 * rho.powi(36)).exp();
        }
    }
}

/// One RK4 step of the split formulation. Phase-free and autonomous, so
/// stage times need no bookkeeping. Invariants are re-enforced once at the
/// end of the step, not between stages.
pub fn step_pe(state: &PEState, dt: f64, omega: f64, nonlinear: bool) -> Result<PEState, PeError> {
    if !(dt > 0.0) {
        return Err(PeError::BadOptions(format!("dt must be positive, got {dt}")));
    }
    let f = |s: &PEState| -> Result<(BarotropicField, BaroclinicField), PeError> {
        if nonlinear {
            rhs_pe(&s.vbar, &s.vtilde, omega)
        } else {
            let mut tilde = s.vtilde.perp();
            tilde.scale(-omega);
            Ok((BarotropicField::zeros(s.n()), tilde))
        }
    };
    let advanced = |s: &PEState, k: &(BarotropicField, BaroclinicField), c: f64| -> PEState {
        let mut out = s.clone();
        out.vbar.axpy(c * dt, &k.0);
        out.vtilde.axpy(c * dt, &k.1);
        out.t = s.t + c * dt;
        out
    };
    let k1 = f(state)?;
    let k2 = f(&advanced(state, &k1, 0.5))?;
    let k3 = f(&advanced(state, &k2, 0.5))?;
    let k4 = f(&advanced(state, &k3, 1.0))?;
    let mut next = state.clone();
    for (k, w) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
        next.vbar.axpy(w * dt / 6.0, &k.0);
        next.vtilde.axpy(w * dt / 6.0, &k.1);
    }
    next.t = state.t + dt;
    if !next.is_finite() {
        return Err(PeError::NonFinite { t: next.t });
    }
    check_drift(&next)?;
    next.sanitize()?;
    Ok(next)
}

/// One RK4 step of the oscillatory formulation, with the phase factors
/// evaluated exactly at the stage times through the stage states' `t`.
pub fn step_osc(state: &OscState, dt: f64, nonlinear: bool) -> Result<OscState, PeError> {
    if !(dt > 0.0) {
        return Err(PeError::BadOptions(format!("dt must be positive, got {dt}")));
    }
    let f = |s: &OscState| -> Result<(BarotropicField, ComplexVelocity), PeError> {
        if nonlinear {
            rhs_osc(s)
        } else {
            Ok((BarotropicField::zeros(s.n()), ComplexVelocity::zeros(s.n())))
        }
    };
    let advanced = |s: &OscState, k: &(BarotropicField, ComplexVelocity), c: f64| -> OscState {
        let mut out = s.clone();
        out.vbar.axpy(c * dt, &k.0);
        out.uplus.axpy(c * dt, &k.1);
        out.t = s.t + c * dt;
        out
    };
    let k1 = f(state)?;
    let k2 = f(&advanced(state, &k1, 0.5))?;
    let k3 = f(&advanced(state, &k2, 0.5))?;
    let k4 = f(&advanced(state, &k3, 1.0))?;
    let mut next = state.clone();
    for (k, w) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
        next.vbar.axpy(w * dt / 6.0, &k.0);
        next.uplus.axpy(w * dt / 6.0, &k.1);
    }
    next.t = state.t + dt;
    if !next.is_finite() {
        return Err(PeError::NonFinite { t: next.t });
    }
    let scale = next.vbar.c1.max_abs().max(next.vbar.c2.max_abs()).max(1.0);
    let div = next.vbar.divergence_residual();
    if div > 1e-6 * scale {
        return Err(PeError::InvariantViolation {
            what: "mean-flow divergence",
            residual: div,
            t: next.t,
        });
    }
    next.sanitize()?;
    Ok(next)
}

fn check_drift(state: &PEState) -> Result<(), PeError> {
    let scale = state
        .vbar
        .c1
        .max_abs()
        .max(state.vbar.c2.max_abs())
        .max(state.vtilde.max_abs())
        .max(1.0);
    let div = state.vbar.divergence_residual();
    if div > 1e-6 * scale {
        return Err(PeError::InvariantViolation {
            what: "mean-flow divergence",
            residual: div,
            t: state.t,
        });
    }
    let plane = state.vtilde.plane_residual();
    if plane > 1e-6 * scale {
        return Err(PeError::InvariantViolation {
            what: "baroclinic mean plane",
            residual: plane,
            t: state.t,
        });
    }
    Ok(())
}

fn plan_steps(t0: f64, t_end: f64, dt: f64) -> Vec<f64> {
    // Fixed dt with a shorter final step to land exactly on t_end.
    let mut steps = Vec::new();
    let mut t = t0;
    while t_end - t > 1e-12 * t_end.abs().max(1.0) {
        let step = dt.min(t_end - t);
        steps.push(step);
        t += step;
    }
    steps
}

/// Advance the split formulation to `t_end`, reporting states to the
/// observer at the configured stride. Returns the final (or last valid)
/// state and why integration stopped.
pub fn integrate_pe(
    initial: &PEState,
    omega: f64,
    opts: &IntegrateOptions,
    mut observer: impl FnMut(&PEState),
) -> Result<(PEState, StopReason), PeError> {
    if !(opts.dt > 0.0) {
        return Err(PeError::BadOptions(format!(
            "dt must be positive, got {}",
            opts.dt
        )));
    }
    let monitor = match opts.monitor {
        Some(thresholds) => Some(BlowupMonitor::new(initial, thresholds)?),
        None => None,
    };
    let mut state = initial.clone();
    observer(&state);
    let stride = opts.stride.max(1);
    let steps = plan_steps(state.t, opts.t_end, opts.dt);
    for (i, dt) in steps.iter().enumerate() {
        state = step_pe(&state, *dt, omega, opts.nonlinear)?;
        if opts.filter {
            filter_plane(&mut state.vbar.c1);
            filter_plane(&mut state.vbar.c2);
            filter_scalar(&mut state.vtilde.c1);
            filter_scalar(&mut state.vtilde.c2);
        }
        let last = i + 1 == steps.len();
        if (i + 1) % stride == 0 || last {
            observer(&state);
        }
        if let Some(mon) = &monitor {
            if let Some(event) = mon.check(&state)? {
                if (i + 1) % stride != 0 && !last {
                    observer(&state);
                }
                return Ok((state, StopReason::Blowup(event)));
            }
        }
    }
    Ok((state, StopReason::Completed))
}

/// Advance the oscillatory formulation to `t_end`.
pub fn integrate_osc(
    initial: &OscState,
    opts: &IntegrateOptions,
    mut observer: impl FnMut(&OscState),
) -> Result<(OscState, StopReason), PeError> {
    if !(opts.dt > 0.0) {
        return Err(PeError::BadOptions(format!(
            "dt must be positive, got {}",
            opts.dt
        )));
    }
    let monitor = match opts.monitor {
        Some(thresholds) => Some(BlowupMonitor::new(&pe_from_osc(initial), thresholds)?),
        None => None,
    };
    let mut state = initial.clone();
    observer(&state);
    let stride = opts.stride.max(1);
    let steps = plan_steps(state.t, opts.t_end, opts.dt);
    for (i, dt) in steps.iter().enumerate() {
        state = step_osc(&state, *dt, opts.nonlinear)?;
        if opts.filter {
            filter_plane(&mut state.vbar.c1);
            filter_plane(&mut state.vbar.c2);
            filter_scalar(&mut state.uplus.c1);
            filter_scalar(&mut state.uplus.c2);
        }
        let last = i + 1 == steps.len();
        if (i + 1) % stride == 0 || last {
            observer(&state);
        }
        if let Some(mon) = &monitor {
            if let Some(event) = mon.check(&pe_from_osc(&state))? {
                if (i + 1) % stride != 0 && !last {
                    observer(&state);
                }
                return Ok((state, StopReason::Blowup(event)));
            }
        }
    }
    Ok((state, StopReason::Completed))
}
