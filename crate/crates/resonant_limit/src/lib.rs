//! The fast-rotation limit system: plane Euler flow for the mean, and a
//! linear transport-with-stretching equation for the depth-varying part.
//!
//! The coupling is one-way. The mean flow evolves on its own as 2D Euler,
//! using the identical kernel as the full dynamics so cross-model
//! comparisons carry no discretization mismatch, and the depth-varying flow
//! is advected by it while its components are rotated at half the local
//! vorticity. Solutions of the full rotating dynamics converge to solutions
//! of this system, viewed in the co-rotating frame, as the rotation rate
//! grows.

use num_complex::Complex64;
use pe_dynamics::PeError;
use projections::{leray2d, BarotropicField, BaroclinicField, ComplexVelocity, PlaneAxis,
    SpectralPlane};
use spectral_core::{
    dealias_in_place, derivative, forward_transform, inverse_transform, Axis, SpectralScalar,
};

/// State of the limit system.
#[derive(Debug, Clone)]
pub struct LimitState {
    pub vbar: BarotropicField,
    pub vtilde: BaroclinicField,
    pub t: f64,
}

impl LimitState {
    pub fn n(&self) -> usize {
        self.vbar.n()
    }

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

/// Mean-flow tendency: plane Euler, shared verbatim with the full dynamics.
pub fn rhs_mean_flow(vbar: &BarotropicField) -> Result<BarotropicField, PeError> {
    pe_dynamics::advect_barotropic(vbar)
}

/// Scalar curl of the mean flow.
pub fn vorticity(vbar: &BarotropicField) -> SpectralPlane {
    let mut z = vbar.c2.derivative(PlaneAxis::X1);
    z.axpy(-1.0, &vbar.c1.derivative(PlaneAxis::X2));
    z
}

/// Depth-varying tendency: advection by the mean flow plus rotation of the
/// component pair at half the local vorticity. Linear in the depth field.
pub fn rhs_depth_flow(
    vbar: &BarotropicField,
    vtilde: &BaroclinicField,
) -> Result<BaroclinicField, PeError> {
    let n = vbar.n();
    if vtilde.max_abs() == 0.0 {
        return Ok(BaroclinicField::zeros(n));
    }
    let vb = [vbar.c1.values(), vbar.c2.values()];
    let curl = vorticity(vbar).values();
    let tilde = [&vtilde.c1, &vtilde.c2];
    let mut phys_c: Vec<Vec<f64>> = Vec::with_capacity(2);
    let mut phys_d1: Vec<Vec<f64>> = Vec::with_capacity(2);
    let mut phys_d2: Vec<Vec<f64>> = Vec::with_capacity(2);
    for comp in tilde {
        phys_c.push(inverse_transform(comp)?);
        phys_d1.push(inverse_transform(&derivative(comp, Axis::X1))?);
        phys_d2.push(inverse_transform(&derivative(comp, Axis::X2))?);
    }
    let mut comps: Vec<SpectralScalar> = Vec::with_capacity(2);
    for i in 0..2 {
        let mut vals = vec![0.0; n * n * n];
        for i12 in 0..n * n {
            let base = i12 * n;
            for i3 in 0..n {
                let idx = base + i3;
                let advect = vb[0][i12] * phys_d1[i][idx] + vb[1][i12] * phys_d2[i][idx];
                // perp of (c1, c2) is (-c2, c1).
                let perp = if i == 0 {
                    -phys_c[1][idx]
                } else {
                    phys_c[0][idx]
                };
                vals[idx] = -advect - 0.5 * curl[i12] * perp;
            }
        }
        let mut spec = forward_transform(&vals, n)?;
        dealias_in_place(&mut spec);
        comps.push(spec);
    }
    let c2 = comps.pop().unwrap();
    let c1 = comps.pop().unwrap();
    let mut out = BaroclinicField { c1, c2 };
    // Advection by a depth-independent flow and pointwise rotation both
    // keep the vertical mean at zero; clear the roundoff left of it.
    zero_plane(&mut out);
    Ok(out)
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

/// Both tendencies of the limit system.
pub fn rhs_limit(state: &LimitState) -> Result<(BarotropicField, BaroclinicField), PeError> {
    Ok((
        rhs_mean_flow(&state.vbar)?,
        rhs_depth_flow(&state.vbar, &state.vtilde)?,
    ))
}

/// Oscillation views of the depth-varying field: the positive and negative
/// projections, each carrying half the energy.
pub fn oscillation_views(vtilde: &BaroclinicField) -> (ComplexVelocity, ComplexVelocity) {
    let (p1, p2) = projections::p_plus_components(&vtilde.c1, &vtilde.c2);
    let (m1, m2) = projections::p_minus_components(&vtilde.c1, &vtilde.c2);
    (
        ComplexVelocity { c1: p1, c2: p2 },
        ComplexVelocity { c1: m1, c2: m2 },
    )
}

/// One RK4 step with the same conventions as the full dynamics: invariants
/// are checked and re-enforced once per step.
pub fn step_limit(state: &LimitState, dt: f64) -> Result<LimitState, PeError> {
    if !(dt > 0.0) {
        return Err(PeError::BadOptions(format!("dt must be positive, got {dt}")));
    }
    let advanced = |s: &LimitState, k: &(BarotropicField, BaroclinicField), c: f64| -> LimitState {
        let mut out = s.clone();
        out.vbar.axpy(c * dt, &k.0);
        out.vtilde.axpy(c * dt, &k.1);
        out.t = s.t + c * dt;
        out
    };
    let k1 = rhs_limit(state)?;
    let k2 = rhs_limit(&advanced(state, &k1, 0.5))?;
    let k3 = rhs_limit(&advanced(state, &k2, 0.5))?;
    let k4 = rhs_limit(&advanced(state, &k3, 1.0))?;
    let mut next = state.clone();
    for (k, w) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
        next.vbar.axpy(w * dt / 6.0, &k.0);
        next.vtilde.axpy(w * dt / 6.0, &k.1);
    }
    next.t = state.t + dt;
    if !next.is_finite() {
        return Err(PeError::NonFinite { t: next.t });
    }
    let scale = next
        .vbar
        .c1
        .max_abs()
        .max(next.vbar.c2.max_abs())
        .max(next.vtilde.max_abs())
        .max(1.0);
    let div = next.vbar.divergence_residual();
    if div > 1e-6 * scale {
        return Err(PeError::InvariantViolation {
            what: "mean-flow divergence",
            residual: div,
            t: next.t,
        });
    }
    let plane = next.vtilde.plane_residual();
    if plane > 1e-6 * scale {
        return Err(PeError::InvariantViolation {
            what: "depth-flow mean plane",
            residual: plane,
            t: next.t,
        });
    }
    next.sanitize()?;
    Ok(next)
}

#[derive(Debug, Clone)]
pub struct LimitOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Observer cadence in steps; initial and final states always report.
    pub stride: usize,
}

impl LimitOptions {
    pub fn new(dt: f64, t_end: f64) -> Self {
        LimitOptions {
            dt,
            t_end,
            stride: 1,
        }
    }
}

/// Advance the limit system to `t_end` with a shorter final step to land
/// exactly on it.
pub fn integrate_limit(
    initial: &LimitState,
    opts: &LimitOptions,
    mut observer: impl FnMut(&LimitState),
) -> Result<LimitState, PeError> {
    if !(opts.dt > 0.0) {
        return Err(PeError::BadOptions(format!(
            "dt must be positive, got {}",
            opts.dt
        )));
    }
    let mut state = initial.clone();
    observer(&state);
    let stride = opts.stride.max(1);
    let mut i = 0usize;
    while opts.t_end - state.t > 1e-12 * opts.t_end.abs().max(1.0) {
        let dt = opts.dt.min(opts.t_end - state.t);
        state = step_limit(&state, dt)?;
        i += 1;
        let done = opts.t_end - state.t <= 1e-12 * opts.t_end.abs().max(1.0);
        if i % stride == 0 || done {
            observer(&state);
        }
    }
    Ok(state)
}

/// Sum of squared coefficients of the mean flow: its conserved energy.
pub fn mean_energy(vbar: &BarotropicField) -> f64 {
    let mut e = 0.0;
    for comp in [&vbar.c1, &vbar.c2] {
        for c in comp.coeffs() {
            e += c.norm_sqr();
        }
    }
    e
}

/// Sum of squared vorticity coefficients: the second conserved quantity of
/// the plane flow.
pub fn enstrophy(vbar: &BarotropicField) -> f64 {
    vorticity(vbar).coeffs().iter().map(|c| c.norm_sqr()).sum()
}

/// Sum of squared coefficients of the depth-varying flow.
pub fn depth_l2_sq(vtilde: &BaroclinicField) -> f64 {
    let mut e = 0.0;
    for comp in [&vtilde.c1, &vtilde.c2] {
        for c in comp.coeffs() {
            e += c.norm_sqr();
        }
    }
    e
}

/// Doubly iterated exponential envelope `a * exp(b^(exp(c t)))` used for
/// qualitative growth checks against the depth-flow norm, whose growth is
/// triple exponential in time in the worst case.
pub fn growth_envelope(a: f64, b: f64, c: f64, t: f64) -> f64 {
    a * (b.powf((c * t).exp())).exp()
}
