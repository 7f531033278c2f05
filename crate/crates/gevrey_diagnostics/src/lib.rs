//! Sobolev and analytic norms, radius-of-analyticity estimation, and the
//! predicted decay schedules for the analyticity radius.
//!
//! Norms weight coefficients by the integer mode magnitude |k| (derivatives
//! carry their 2 pi elsewhere). The analytic family uses the weight
//! `1 + |k|^{2r} e^{2 tau |k|}`, so it splits exactly into a weighted
//! semi-norm plus the plain l2 norm.

use projections::{BarotropicField, SpectralPlane};
use spectral_core::{slot_to_k, SpectralScalar};
use std::ops::RangeInclusive;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GevreyError {
    #[error("invalid norm parameters: r = {r}, tau = {tau}")]
    InvalidSpec { r: f64, tau: f64 },
    #[error("need at least {needed} populated shells, found {got}")]
    InsufficientShells { needed: usize, got: usize },
    #[error("no root in search bracket: {0}")]
    NoRoot(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
}

/// Parameters of the analytic norm family. The Gevrey order `s` is fixed at
/// 1 (analytic class); the field exists so reports can state it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub r: f64,
    pub tau: f64,
    pub s: f64,
}

impl NormSpec {
    pub fn new(r: f64, tau: f64) -> Result<Self, GevreyError> {
        if !(r >= 0.0) || !(tau >= 0.0) {
            return Err(GevreyError::InvalidSpec { r, tau });
        }
        Ok(NormSpec { r, tau, s: 1.0 })
    }
}

/// Weight |k|^{2r} e^{2 tau |k|} |c|^2 accumulated in log space so large
/// tau |k| cannot overflow intermediate terms.
struct WeightedAccumulator {
    r: f64,
    tau: f64,
    // Plain sum for terms small enough to add directly.
    direct: f64,
    // Log-space terms for the rest.
    logs: Vec<f64>,
}

impl WeightedAccumulator {
    fn new(r: f64, tau: f64) -> Self {
        WeightedAccumulator {
            r,
            tau,
            direct: 0.0,
            logs: Vec::new(),
        }
    }

    fn push(&mut self, knorm: f64, mag_sq: f64) {
        if mag_sq == 0.0 {
            return;
        }
        if knorm == 0.0 {
            // |k|^{2r} is 1 for r = 0 and 0 otherwise; the exponential is 1.
            if self.r == 0.0 {
                self.direct += mag_sq;
            }
            return;
        }
        let log_term = 2.0 * self.r * knorm.ln() + 2.0 * self.tau * knorm + mag_sq.ln();
        if log_term < 500.0 {
            self.direct += log_term.exp();
        } else {
            self.logs.push(log_term);
        }
    }

    /// Natural log of the accumulated sum; negative infinity for an empty
    /// sum. Stays finite even when the sum itself overflows.
    fn log_sum(&self) -> f64 {
        let direct_log = if self.direct > 0.0 {
            self.direct.ln()
        } else {
            f64::NEG_INFINITY
        };
        if self.logs.is_empty() {
            return direct_log;
        }
        let peak = self
            .logs
            .iter()
            .cloned()
            .fold(direct_log, f64::max);
        let mut scaled: f64 = self.logs.iter().map(|l| (l - peak).exp()).sum();
        if direct_log.is_finite() {
            scaled += (direct_log - peak).exp();
        }
        peak + scaled.ln()
    }

}

/// `sqrt(base_sq + exp(acc.log_sum()))` without overflowing representable
/// results: past e^700 the base is negligible and the square root is taken
/// in log space.
fn norm_from_parts(base_sq: f64, acc: &WeightedAccumulator) -> f64 {
    let lw = acc.log_sum();
    if lw < 700.0 {
        let weighted = if lw == f64::NEG_INFINITY { 0.0 } else { lw.exp() };
        (base_sq + weighted).sqrt()
    } else {
        (0.5 * lw).exp()
    }
}

fn mode_norms_3d(n: usize) -> impl Iterator<Item = (usize, f64)> {
    (0..n).flat_map(move |i1| {
        (0..n).flat_map(move |i2| {
            (0..n).map(move |i3| {
                let k1 = slot_to_k(i1, n) as f64;
                let k2 = slot_to_k(i2, n) as f64;
                let k3 = slot_to_k(i3, n) as f64;
                (
                    (i1 * n + i2) * n + i3,
                    (k1 * k1 + k2 * k2 + k3 * k3).sqrt(),
                )
            })
        })
    })
}

fn mode_norms_2d(n: usize) -> impl Iterator<Item = (usize, f64)> {
    (0..n).flat_map(move |i1| {
        (0..n).map(move |i2| {
            let k1 = slot_to_k(i1, n) as f64;
            let k2 = slot_to_k(i2, n) as f64;
            (i1 * n + i2, (k1 * k1 + k2 * k2).sqrt())
        })
    })
}

/// Weighted accumulator over several components sharing one grid.
fn weighted_acc_components(fields: &[&SpectralScalar], r: f64, tau: f64) -> WeightedAccumulator {
    let mut acc = WeightedAccumulator::new(r, tau);
    for f in fields {
        for (idx, knorm) in mode_norms_3d(f.n()) {
            acc.push(knorm, f.coeffs()[idx].norm_sqr());
        }
    }
    acc
}

fn weighted_acc_planes(fields: &[&SpectralPlane], r: f64, tau: f64) -> WeightedAccumulator {
    let mut acc = WeightedAccumulator::new(r, tau);
    for f in fields {
        for (idx, knorm) in mode_norms_2d(f.n()) {
            acc.push(knorm, f.coeffs()[idx].norm_sqr());
        }
    }
    acc
}

fn l2_sq_components(fields: &[&SpectralScalar]) -> f64 {
    fields
        .iter()
        .flat_map(|f| f.coeffs().iter())
        .map(|c| c.norm_sqr())
        .sum()
}

fn l2_sq_planes(fields: &[&SpectralPlane]) -> f64 {
    fields
        .iter()
        .flat_map(|f| f.coeffs().iter())
        .map(|c| c.norm_sqr())
        .sum()
}

pub fn l2_norm(f: &SpectralScalar) -> f64 {
    l2_sq_components(&[f]).sqrt()
}

pub fn l2_norm_pair(a: &SpectralScalar, b: &SpectralScalar) -> f64 {
    l2_sq_components(&[a, b]).sqrt()
}

/// `sqrt(sum (1 + |k|^{2r}) |c|^2)` over all components.
pub fn sobolev_norm_components(fields: &[&SpectralScalar], r: f64) -> f64 {
    norm_from_parts(l2_sq_components(fields), &weighted_acc_components(fields, r, 0.0))
}

pub fn sobolev_norm(f: &SpectralScalar, r: f64) -> f64 {
    sobolev_norm_components(&[f], r)
}

pub fn sobolev_norm_pair(a: &SpectralScalar, b: &SpectralScalar, r: f64) -> f64 {
    sobolev_norm_components(&[a, b], r)
}

/// `sqrt(sum (1 + |k|^{2r} e^{2 tau |k|}) |c|^2)` over all components.
pub fn analytic_norm_components(fields: &[&SpectralScalar], spec: &NormSpec) -> f64 {
    norm_from_parts(
        l2_sq_components(fields),
        &weighted_acc_components(fields, spec.r, spec.tau),
    )
}

pub fn analytic_norm(f: &SpectralScalar, spec: &NormSpec) -> f64 {
    analytic_norm_components(&[f], spec)
}

pub fn analytic_norm_pair(a: &SpectralScalar, b: &SpectralScalar, spec: &NormSpec) -> f64 {
    analytic_norm_components(&[a, b], spec)
}

/// The weighted semi-norm `sqrt(sum |k|^{2r} e^{2 tau |k|} |c|^2)`. Together
/// with the l2 norm it reassembles the analytic norm:
/// `analytic^2 = seminorm^2 + l2^2`.
pub fn weighted_seminorm_components(fields: &[&SpectralScalar], r: f64, tau: f64) -> f64 {
    norm_from_parts(0.0, &weighted_acc_components(fields, r, tau))
}

pub fn weighted_seminorm(f: &SpectralScalar, r: f64, tau: f64) -> f64 {
    weighted_seminorm_components(&[f], r, tau)
}

pub fn weighted_seminorm_pair(a: &SpectralScalar, b: &SpectralScalar, r: f64, tau: f64) -> f64 {
    weighted_seminorm_components(&[a, b], r, tau)
}

/// Norms of the mean-plane field, weighted by the 2D mode magnitude. A plane
/// mode has the same |k| as its 3D embedding, so these add in squares with
/// the baroclinic norms.
pub fn sobolev_norm_bar(v: &BarotropicField, r: f64) -> f64 {
    let planes = [&v.c1, &v.c2];
    norm_from_parts(l2_sq_planes(&planes), &weighted_acc_planes(&planes, r, 0.0))
}

pub fn analytic_norm_bar(v: &BarotropicField, spec: &NormSpec) -> f64 {
    let planes = [&v.c1, &v.c2];
    norm_from_parts(
        l2_sq_planes(&planes),
        &weighted_acc_planes(&planes, spec.r, spec.tau),
    )
}

pub fn weighted_seminorm_bar(v: &BarotropicField, r: f64, tau: f64) -> f64 {
    norm_from_parts(0.0, &weighted_acc_planes(&[&v.c1, &v.c2], r, tau))
}

pub fn l2_norm_bar(v: &BarotropicField) -> f64 {
    l2_sq_planes(&[&v.c1, &v.c2]).sqrt()
}

/// Squared analytic size of a split state, the quantity the decay schedules
/// call M0.
pub fn split_analytic_sq(
    vbar: &BarotropicField,
    vtilde: &projections::BaroclinicField,
    spec: &NormSpec,
) -> f64 {
    let bar = analytic_norm_bar(vbar, spec);
    let tilde = analytic_norm_pair(&vtilde.c1, &vtilde.c2, spec);
    bar * bar + tilde * tilde
}

/// Radius estimate from the decay of shell maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEstimate {
    pub tau_hat: f64,
    pub fit_residual: f64,
    pub shells_used: usize,
}

/// Default fit window: away from the lowest shells and inside the dealiased
/// band.
pub fn default_shell_range(n: usize) -> RangeInclusive<usize> {
    let lo = (n as f64 / 8.0).ceil() as usize;
    let hi = n / 3;
    lo.max(1)..=hi.max(lo.max(1))
}

/// Least-squares slope of `-log(shell max |c|)` against |k|, the decay-rate
/// proxy for the analyticity radius.
///
/// Each integer shell `s` in the range contributes its maximum coefficient
/// magnitude over modes with round(|k|) = s, taken across all components,
/// with the abscissa at the |k| where the maximum is attained. Shells with
/// no nonzero coefficient are skipped; at least 3 populated shells are
/// required. The slope is clamped at 0.
pub fn estimate_radius(
    fields: &[&SpectralScalar],
    shells: RangeInclusive<usize>,
) -> Result<RadiusEstimate, GevreyError> {
    let lo = *shells.start();
    let hi = *shells.end();
    let mut shell_max: Vec<(f64, f64)> = Vec::new();
    for s in lo..=hi {
        let mut best: Option<(f64, f64)> = None;
        for f in fields {
            for (idx, knorm) in mode_norms_3d(f.n()) {
                if knorm.round() as usize != s {
                    continue;
                }
                let mag = f.coeffs()[idx].norm();
                if mag == 0.0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((_, m)) => mag > m,
                };
                if better {
                    best = Some((knorm, mag));
                }
            }
        }
        if let Some(pair) = best {
            shell_max.push(pair);
        }
    }
    if shell_max.len() < 3 {
        return Err(GevreyError::InsufficientShells {
            needed: 3,
            got: shell_max.len(),
        });
    }
    // Fit y = a + b x with y = -log(max), x = |k|.
    let m = shell_max.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, mag) in &shell_max {
        let y = -mag.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = m * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(GevreyError::BadParams(
            "degenerate abscissas in radius fit".into(),
        ));
    }
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let mut residual_sq = 0.0;
    for &(x, mag) in &shell_max {
        let y = -mag.ln();
        let e = y - (intercept + slope * x);
        residual_sq += e * e;
    }
    Ok(RadiusEstimate {
        tau_hat: slope.max(0.0),
        fit_residual: (residual_sq / m).sqrt(),
        shells_used: shell_max.len(),
    })
}

/// Predicted radius along the local solution: `tau0 - 2 t Cr (1 + M0)`,
/// where M0 is the squared analytic size of the data at radius tau0. May go
/// negative; callers clamp for display.
pub fn predicted_tau_local(tau0: f64, m0: f64, cr: f64, t: f64) -> f64 {
    tau0 - 2.0 * t * cr * (1.0 + m0)
}

/// Inputs for the three lifespan predictions. The constants are free
/// parameters; nothing here asserts their values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LifespanParams {
    /// Closed form `tau0 / (1 + 2 Cr (1 + M0))`.
    Local { tau0: f64, m0: f64, cr: f64 },
    /// Solve `int_0^T exp(K(s)) ds = tau0 / (2 eps)` with
    /// `K(s) = c_m^(exp(c_r s))`.
    SmallBaroclinic {
        tau0: f64,
        eps: f64,
        c_m: f64,
        c_r: f64,
    },
    /// Solve `c_tau0 * exp(Ktilde(T)) = |omega0|` with
    /// `Ktilde(t) = exp(c_m^(exp(c_r t)))`.
    FastRotation {
        c_tau0: f64,
        c_m: f64,
        c_r: f64,
        omega0: f64,
    },
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lifespan prediction for the requested regime, solved by bisection on the
/// defining scalar equation.
pub fn predicted_lifespan(params: &LifespanParams) -> Result<f64, GevreyError> {
    match *params {
        LifespanParams::Local { tau0, m0, cr } => {
            if tau0 < 0.0 || cr <= 0.0 || m0 < 0.0 {
                return Err(GevreyError::BadParams(format!(
                    "local lifespan needs tau0 >= 0, cr > 0, m0 >= 0; got {tau0}, {cr}, {m0}"
                )));
            }
            Ok(tau0 / (1.0 + 2.0 * cr * (1.0 + m0)))
        }
        LifespanParams::SmallBaroclinic {
            tau0,
            eps,
            c_m,
            c_r,
        } => {
            if tau0 <= 0.0 || eps <= 0.0 || c_m <= 0.0 || c_r <= 0.0 {
                return Err(GevreyError::BadParams(format!(
                    "small-baroclinic lifespan needs positive tau0, eps, c_m, c_r; got {tau0}, {eps}, {c_m}, {c_r}"
                )));
            }
            let target = tau0 / (2.0 * eps);
            let k = move |s: f64| c_m.powf((c_r * s).exp());
            let integral = move |t: f64| {
                if t == 0.0 {
                    0.0
                } else {
                    simpson(|s| k(s).exp(), 0.0, t, 2048)
                }
            };
            let mut hi = 1.0;
            let mut tries = 0;
            while integral(hi) < target {
                hi *= 2.0;
                tries += 1;
                if tries > 60 {
                    return Err(GevreyError::NoRoot(format!(
                        "integral never reaches {target}"
                    )));
                }
            }
            Ok(bisect(|t| integral(t) - target, 0.0, hi))
        }
        LifespanParams::FastRotation {
            c_tau0,
            c_m,
            c_r,
            omega0,
        } => {
            if c_tau0 <= 0.0 || c_m <= 1.0 || c_r <= 0.0 {
                return Err(GevreyError::BadParams(format!(
                    "fast-rotation lifespan needs c_tau0 > 0, c_m > 1, c_r > 0; got {c_tau0}, {c_m}, {c_r}"
                )));
            }
            let mag = omega0.abs();
            // Solve exp(c_m^(exp(c_r t))) = ln(mag / c_tau0) in log form to
            // dodge the double exponential.
            let level = mag.ln() - c_tau0.ln();
            if !(level > 1.0) {
                return Err(GevreyError::NoRoot(format!(
                    "rotation rate {mag} too small relative to c_tau0 = {c_tau0}"
                )));
            }
            let target = level.ln();
            let g = move |t: f64| c_m.powf((c_r * t).exp()) - target;
            if g(0.0) >= 0.0 {
                return Err(GevreyError::NoRoot(
                    "defining equation already exceeded at t = 0".into(),
                ));
            }
            let mut hi = 1.0;
            let mut tries = 0;
            while g(hi) < 0.0 {
                hi *= 2.0;
                tries += 1;
                if tries > 60 {
                    return Err(GevreyError::NoRoot("no sign change found".into()));
                }
            }
            Ok(bisect(g, 0.0, hi))
        }
    }
}
