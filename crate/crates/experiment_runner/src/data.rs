//! Deterministic initial states for the scenarios.
//!
//! Everything here is built directly in coefficient space so runs are
//! bit-reproducible. All data stays inside the dealiased band, which keeps
//! every quadratic product alias-free for the whole run.

use std::f64::consts::PI;

use gevrey_diagnostics::{analytic_norm_pair, l2_norm_pair, sobolev_norm_pair, NormSpec};
use num_complex::Complex64;
use pe_dynamics::PEState;
use projections::{BarotropicField, BaroclinicField, PlaneAxis, SpectralPlane};
use spectral_core::{band_limit, SpectralScalar, WaveVector};

use crate::config::prepared_mode_index;
use crate::RunnerError;

/// Grid resolution of the profile quadrature. Fine enough that quadrature
/// error sits far below the retained-band truncation error.
const PROFILE_QUADRATURE_POINTS: usize = 4096;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Depth-averaged flow used as the default background: a stream function
/// with two incommensurate harmonics, so the flow is genuinely unsteady.
/// Solenoidal and mean-free by construction.
pub fn standard_mean_flow(n: usize, amplitude: f64) -> BarotropicField {
    let mut psi = SpectralPlane::zeros(n);
    // cos(2 pi x1) cos(2 pi x2) piece
    let a = 0.6 * amplitude / (2.0 * PI);
    for (k1, k2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        psi.set(k1, k2, c(0.25 * a, 0.0));
    }
    // cos(4 pi x2) piece
    let b = 0.25 * amplitude / (2.0 * PI);
    psi.set(0, 2, c(0.5 * b, 0.0));
    psi.set(0, -2, c(0.5 * b, 0.0));
    let d1 = psi.derivative(PlaneAxis::X1);
    let mut c1 = psi.derivative(PlaneAxis::X2);
    c1.scale(-1.0);
    BarotropicField { c1, c2: d1 }
}

/// Smooth order-one depth-varying shape shared by several scenarios:
/// cos(2 pi x1) cos(2 pi z) in the first component and a weaker
/// cos(2 pi x2) cos(4 pi z) in the second. Even in z, no depth mean.
pub fn baroclinic_seed(n: usize) -> BaroclinicField {
    let mut c1 = SpectralScalar::zeros(n);
    let mut c2 = SpectralScalar::zeros(n);
    for (k1, k3) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        c1.set(WaveVector { k1, k2: 0, k3 }, c(0.25, 0.0));
    }
    for (k2, k3) in [(1, 2), (1, -2), (-1, 2), (-1, -2)] {
        c2.set(WaveVector { k1: 0, k2, k3 }, c(0.175, 0.0));
    }
    BaroclinicField { c1, c2 }
}

/// Cosine coefficients of the steepening-profile depth shape, one entry per
/// vertical wavenumber starting at 1, truncated to the dealiased band.
///
/// The nominal channel profile is -z^2 + 1/3; only its even-reflection
/// content is representable in the periodic even class, so the quadrature
/// integrates the symmetrized profile (f(z) + f(1 - z)) / 2 against
/// cos(2 pi m z).
pub fn blowup_profile_coefficients(n: usize) -> Vec<f64> {
    let m_max = band_limit(n);
    let nq = PROFILE_QUADRATURE_POINTS;
    let mut coeffs = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let mut acc = 0.0f64;
        for j in 0..nq {
            let z = j as f64 / nq as f64;
            let f = -z * z + 1.0 / 3.0;
            let fr = -(1.0 - z) * (1.0 - z) + 1.0 / 3.0;
            acc += 0.5 * (f + fr) * (2.0 * PI * m as f64 * z).cos();
        }
        coeffs.push(2.0 * acc / nq as f64);
    }
    coeffs
}

/// Evaluate the truncated profile at depth z.
pub fn blowup_profile_value(coeffs: &[f64], z: f64) -> f64 {
    let mut acc = 0.0;
    for (i, a) in coeffs.iter().enumerate() {
        let m = (i + 1) as f64;
        acc += a * (2.0 * PI * m * z).cos();
    }
    acc
}

/// Steepening initial state: first velocity component lambda Q(z) sin(2 pi x1)
/// in the depth-varying part, second component -omega sin(2 pi x1) in the
/// depth average. The depth average of Q vanishes, so the split is exact.
pub fn blowup_state(n: usize, lambda: f64, omega: f64) -> Result<PEState, RunnerError> {
    let mut vbar = BarotropicField::zeros(n);
    // -omega sin(2 pi x1) has coefficients +- i omega / 2 at (+-1, 0)
    vbar.c2.set(1, 0, c(0.0, 0.5 * omega));
    vbar.c2.set(-1, 0, c(0.0, -0.5 * omega));

    let mut vtilde = BaroclinicField::zeros(n);
    let coeffs = blowup_profile_coefficients(n);
    for (i, a) in coeffs.iter().enumerate() {
        let m = (i + 1) as i32;
        // lambda a_m cos(2 pi m z) sin(2 pi x1): coefficient -i lambda a_m / 4
        // at k1 = +1 and +i lambda a_m / 4 at k1 = -1, for both signs of k3.
        let w = 0.25 * lambda * a;
        for k3 in [m, -m] {
            vtilde.c1.set(WaveVector { k1: 1, k2: 0, k3 }, c(0.0, -w));
            vtilde.c1.set(WaveVector { k1: -1, k2: 0, k3 }, c(0.0, w));
        }
    }

    let mut state = PEState {
        vbar,
        vtilde,
        t: 0.0,
    };
    state
        .sanitize()
        .map_err(|e| RunnerError::Numerical(format!("blowup data: {e}")))?;
    Ok(state)
}

/// Norms reported alongside rotation-adapted data.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct WellPreparedReport {
    /// Vertical wavenumber of the excited mode.
    pub mode: u64,
    /// Coefficient amplitude.
    pub amplitude: f64,
    /// Plain Sobolev size of the depth-varying part at exponent 3.5.
    pub sobolev_h3p5: f64,
    /// Weighted norm at exponent r + 2 and radius tau0.
    pub weighted_high: f64,
}

/// Single-mode depth-varying data adapted to rotation rate omega: vertical
/// wavenumber ceil(ln|omega| / tau0) and amplitude (ln|omega|)^(-r-2) / |omega|,
/// on top of the standard depth-averaged flow.
pub fn well_prepared_state(
    n: usize,
    omega: f64,
    tau0: f64,
    r: f64,
    mean_amplitude: f64,
) -> Result<(PEState, WellPreparedReport), RunnerError> {
    if !(omega.abs() > std::f64::consts::E) {
        return Err(RunnerError::Config(format!(
            "rotation-adapted data needs |omega| > e, got {omega}"
        )));
    }
    let m = prepared_mode_index(omega, tau0);
    let band = band_limit(n) as u64;
    if m > band {
        return Err(RunnerError::Config(format!(
            "rotation-adapted mode |k| = {m} exceeds the dealiased band {band} at n = {n}"
        )));
    }
    let la = omega.abs().ln();
    let amplitude = la.powf(-(r + 2.0)) / omega.abs();

    let mut vtilde = BaroclinicField::zeros(n);
    let k3 = m as i32;
    // amplitude cos(2 pi m z) in the first component: real, even in z
    vtilde.c1.set(WaveVector { k1: 0, k2: 0, k3 }, c(0.5 * amplitude, 0.0));
    vtilde
        .c1
        .set(WaveVector { k1: 0, k2: 0, k3: -k3 }, c(0.5 * amplitude, 0.0));

    let spec_high = NormSpec::new(r + 2.0, tau0)
        .map_err(|e| RunnerError::Config(format!("norm settings: {e}")))?;
    let report = WellPreparedReport {
        mode: m,
        amplitude,
        sobolev_h3p5: sobolev_norm_pair(&vtilde.c1, &vtilde.c2, 3.5),
        weighted_high: analytic_norm_pair(&vtilde.c1, &vtilde.c2, &spec_high),
    };

    let state = PEState {
        vbar: standard_mean_flow(n, mean_amplitude),
        vtilde,
        t: 0.0,
    };
    Ok((state, report))
}

/// Depth-varying seed scaled so its weighted norm at (r, tau0) equals epsilon,
/// on top of the standard depth-averaged flow.
pub fn epsilon_state(
    n: usize,
    epsilon: f64,
    tau0: f64,
    r: f64,
    mean_amplitude: f64,
) -> Result<(PEState, f64), RunnerError> {
    let spec = NormSpec::new(r, tau0)
        .map_err(|e| RunnerError::Config(format!("norm settings: {e}")))?;
    let mut vtilde = baroclinic_seed(n);
    let current = analytic_norm_pair(&vtilde.c1, &vtilde.c2, &spec);
    if !(current > 0.0) {
        return Err(RunnerError::Numerical(
            "depth-varying seed has zero weighted norm".to_owned(),
        ));
    }
    let scale = epsilon / current;
    vtilde.scale(scale);
    let state = PEState {
        vbar: standard_mean_flow(n, mean_amplitude),
        vtilde,
        t: 0.0,
    };
    Ok((state, scale))
}

/// Deterministic state with both parts at prescribed sizes; the optional
/// perturbation adds a seeded random depth-varying field before the state is
/// projected back onto its invariants.
pub fn composite_state(
    n: usize,
    mean_amplitude: f64,
    depth_amplitude: f64,
    perturbation: f64,
    seed: u64,
) -> Result<PEState, RunnerError> {
    let vbar = standard_mean_flow(n, mean_amplitude);
    let mut vtilde = baroclinic_seed(n);
    let current = l2_norm_pair(&vtilde.c1, &vtilde.c2);
    if depth_amplitude == 0.0 {
        vtilde = BaroclinicField::zeros(n);
    } else {
        vtilde.scale(depth_amplitude / current);
    }
    if perturbation > 0.0 {
        let cap = band_limit(n) as u32;
        let sample = lemma_verifier::sample_fields(n, cap, 0.5, seed, true);
        let size = l2_norm_pair(&sample.f1, &sample.f2).max(1e-300);
        let w = perturbation / size;
        vtilde.c1.axpy(w, &sample.f1);
        vtilde.c2.axpy(w, &sample.f2);
    }
    let mut state = PEState {
        vbar,
        vtilde,
        t: 0.0,
    };
    state
        .sanitize()
        .map_err(|e| RunnerError::Numerical(format!("composite data: {e}")))?;
    Ok(state)
}
