//! Ensemble verification of the structural identities and weighted-norm
//! estimates that the solver stack relies on.
//!
//! Two kinds of statements are covered. Exact identities (projector algebra,
//! adjointness, norm partitions) must hold to roundoff on every sample, and
//! are summarized by their worst relative residual. Bilinear and trilinear
//! estimates hold up to an unspecified uniform constant; for those the
//! checker evaluates the left side and the structural right side (without
//! the constant) and records the worst observed ratio. A uniform constant
//! manifests as ratios that stay bounded and stable when the grid and mode
//! cap are refined.
//!
//! All generated fields are zero-mean by construction, so right-side terms
//! involving the mean coefficient are identically zero on ensemble runs;
//! the single-sample entry points accept arbitrary fields and evaluate
//! those terms honestly.

use gevrey_diagnostics::{
    analytic_norm, analytic_norm_pair, l2_norm, l2_norm_bar, l2_norm_pair, split_analytic_sq,
    weighted_seminorm, weighted_seminorm_pair, GevreyError, NormSpec,
};
use num_complex::Complex64;
use projections::{
    assemble, baroclinic, barotropic, bilinear_pairing_pair, divergence3, l2_inner, leray2d,
    p_minus, p_minus_complex, p_plus, p_plus_complex, p_plus_components,
    vertical_integral_div_components, BaroclinicField, ProjectionError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use spectral_core::{
    band_limit, derivative, forward_transform, inverse_transform, modes, Axis, HorizontalVelocity,
    SpectralError, SpectralScalar, WaveVector,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifierError {
    #[error("invalid ensemble: {0}")]
    BadEnsemble(String),
    #[error("exponent r = {r} is outside the validity range (r > {floor}) for {check}")]
    ExponentRange { check: String, r: f64, floor: f64 },
    #[error("radius tau = {0} must be finite and nonnegative")]
    BadRadius(f64),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Norm(#[from] GevreyError),
}

/// Description of a seeded random field ensemble.
///
/// Every sample is generated from a seed derived deterministically from
/// `seed` and the sample index, so the same spec always produces the same
/// ensemble. Each scalar field gets independent complex unit-normal
/// coefficients, damped by `exp(-decay |k|)` and symmetrized to make the
/// field real, on the modes with `max(|k1|,|k2|,|k3|) <= mode_cap`. The mean
/// coefficient is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n: usize,
    pub mode_cap: u32,
    pub samples: usize,
    pub seed: u64,
    pub decay: f64,
}

pub const DEFAULT_DECAY: f64 = 0.25;

impl EnsembleSpec {
    /// Ensemble with the mode cap tied to the alias-free band of the grid.
    pub fn standard(n: usize, samples: usize, seed: u64) -> Self {
        EnsembleSpec {
            n,
            mode_cap: band_limit(n),
            samples,
            seed,
            decay: DEFAULT_DECAY,
        }
    }

    /// The identical ensemble law evaluated on the doubled grid: same mode
    /// cap, same seeds, same coefficients. Ratios must be grid independent
    /// to roundoff; a deviation would expose aliasing in the evaluation.
    pub fn refined(&self) -> Self {
        EnsembleSpec {
            n: self.n * 2,
            mode_cap: self.mode_cap,
            samples: self.samples,
            seed: self.seed,
            decay: self.decay,
        }
    }

    /// Doubled grid with the mode cap widened to its alias-free band. The
    /// worst ratio over the widened ensemble must not drift upward; growth
    /// under band widening is the signature of an unbounded constant.
    pub fn widened(&self) -> Self {
        EnsembleSpec {
            n: self.n * 2,
            mode_cap: band_limit(self.n * 2),
            samples: self.samples,
            seed: self.seed,
            decay: self.decay,
        }
    }

    pub fn validate(&self) -> Result<(), VerifierError> {
        if self.n < 8 || self.n % 2 != 0 {
            return Err(VerifierError::BadEnsemble(format!(
                "grid size {} must be even and at least 8",
                self.n
            )));
        }
        if self.mode_cap == 0 || self.mode_cap > band_limit(self.n) {
            return Err(VerifierError::BadEnsemble(format!(
                "mode cap {} must lie in 1..={} for grid {}",
                self.mode_cap,
                band_limit(self.n),
                self.n
            )));
        }
        if self.samples == 0 {
            return Err(VerifierError::BadEnsemble("sample count is zero".into()));
        }
        if !self.decay.is_finite() || self.decay < 0.0 {
            return Err(VerifierError::BadEnsemble(format!(
                "decay {} must be finite and nonnegative",
                self.decay
            )));
        }
        Ok(())
    }

    /// Seed of one sample's generator; recorded in reports so the worst
    /// sample can be regenerated directly via `sample_fields`.
    pub fn sample_seed(&self, index: usize) -> u64 {
        self.seed
            .wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// One random real scalar field: complex unit-normal coefficients times
/// `exp(-decay |k|)` on the capped mode box, Hermitian-symmetrized, zero
/// mean. With `mean_free` set, the whole `k3 = 0` plane is left empty.
fn draw_scalar(
    rng: &mut ChaCha8Rng,
    n: usize,
    cap: u32,
    decay: f64,
    mean_free: bool,
) -> SpectralScalar {
    let c = cap as i32;
    let mut out = SpectralScalar::zeros(n);
    for k1 in -c..=c {
        for k2 in -c..=c {
            for k3 in -c..=c {
                // One draw per conjugate pair, keyed by the lexicographically
                // positive member; k = 0 is skipped entirely.
                let lex_positive = k1 > 0 || (k1 == 0 && (k2 > 0 || (k2 == 0 && k3 > 0)));
                if !lex_positive {
                    continue;
                }
                if mean_free && k3 == 0 {
                    continue;
                }
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let knorm = ((k1 * k1 + k2 * k2 + k3 * k3) as f64).sqrt();
                let z = Complex64::new(re, im) * (-decay * knorm).exp();
                out.set(WaveVector { k1, k2, k3 }, z);
                out.set(
                    WaveVector {
                        k1: -k1,
                        k2: -k2,
                        k3: -k3,
                    },
                    z.conj(),
                );
            }
        }
    }
    out
}

/// The four fields entering one estimate evaluation: a two-component first
/// factor `f = (f1, f2)` and scalar fields `g` and `h`.
#[derive(Debug, Clone)]
pub struct EstimateSample {
    pub f1: SpectralScalar,
    pub f2: SpectralScalar,
    pub g: SpectralScalar,
    pub h: SpectralScalar,
}

/// Regenerates the fields of one sample from its recorded seed.
pub fn sample_fields(
    n: usize,
    mode_cap: u32,
    decay: f64,
    sample_seed: u64,
    mean_free_first: bool,
) -> EstimateSample {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let f1 = draw_scalar(&mut rng, n, mode_cap, decay, mean_free_first);
    let f2 = draw_scalar(&mut rng, n, mode_cap, decay, mean_free_first);
    let g = draw_scalar(&mut rng, n, mode_cap, decay, false);
    let h = draw_scalar(&mut rng, n, mode_cap, decay, false);
    EstimateSample { f1, f2, g, h }
}

// ---------------------------------------------------------------------------
// Weighted spectral helpers.
// ---------------------------------------------------------------------------

fn mode_weight(knorm: f64, r: f64, tau: f64) -> f64 {
    if knorm == 0.0 {
        if r == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        knorm.powf(r) * (tau * knorm).exp()
    }
}

/// Mode-wise application of the weight `|k|^r exp(tau |k|)`.
fn apply_weight(f: &SpectralScalar, r: f64, tau: f64) -> SpectralScalar {
    let mut out = f.clone();
    for k in modes(f.n()) {
        let knorm = ((k.k1 * k.k1 + k.k2 * k.k2 + k.k3 * k.k3) as f64).sqrt();
        let idx = out.slot_of(k);
        out.coeffs_mut()[idx] *= mode_weight(knorm, r, tau);
    }
    out
}

/// `sum_k |k|^{2r} exp(2 tau |k|) Re(a_k conj(b_k))`, the doubly weighted
/// pairing in which the estimate left sides are stated.
fn weighted_inner(a: &SpectralScalar, b: &SpectralScalar, r: f64, tau: f64) -> f64 {
    let mut acc = 0.0;
    for k in modes(a.n()) {
        let knorm = ((k.k1 * k.k1 + k.k2 * k.k2 + k.k3 * k.k3) as f64).sqrt();
        let w = mode_weight(knorm, r, tau);
        let idx = a.slot_of(k);
        acc += w * w * (a.coeffs()[idx] * b.coeffs()[idx].conj()).re;
    }
    acc
}

/// Physical-space product of two real fields on their common grid.
///
/// With both factors band-limited to the alias-free band `band_limit(n)`,
/// every product coefficient on that band is the exact convolution sum, so
/// pairings against band-limited fields are exact. The tail beyond
/// `n - 2 band_limit(n)` may carry wraparound and must not be paired against
/// wider fields; `multiply_exact` avoids this entirely by padding.
fn multiply(a: &SpectralScalar, b: &SpectralScalar) -> Result<SpectralScalar, VerifierError> {
    let av = inverse_transform(a)?;
    let bv = inverse_transform(b)?;
    let prod: Vec<f64> = av.iter().zip(&bv).map(|(x, y)| x * y).collect();
    Ok(forward_transform(&prod, a.n())?)
}

/// Copies a field's coefficients onto a finer grid by wavevector.
fn embed(f: &SpectralScalar, m: usize) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(m);
    for k in modes(f.n()) {
        let v = f.get(k);
        if v != Complex64::new(0.0, 0.0) {
            out.set(k, v);
        }
    }
    out
}

/// Exact product via zero-padding to the doubled grid: with factors
/// band-limited to `band_limit(n)`, every coefficient of the result is the
/// true convolution sum, including the full tail of the product.
fn multiply_exact(a: &SpectralScalar, b: &SpectralScalar) -> Result<SpectralScalar, VerifierError> {
    let m = 2 * a.n();
    multiply(&embed(a, m), &embed(b, m))
}

/// `f1 d1(g) + f2 d2(g)` through physical space.
fn advect(
    f1: &SpectralScalar,
    f2: &SpectralScalar,
    g: &SpectralScalar,
) -> Result<SpectralScalar, VerifierError> {
    let a1 = inverse_transform(f1)?;
    let a2 = inverse_transform(f2)?;
    let g1 = inverse_transform(&derivative(g, Axis::X1))?;
    let g2 = inverse_transform(&derivative(g, Axis::X2))?;
    let prod: Vec<f64> = a1
        .iter()
        .zip(&a2)
        .zip(g1.iter().zip(&g2))
        .map(|((x1, x2), (y1, y2))| x1 * y1 + x2 * y2)
        .collect();
    Ok(forward_transform(&prod, f1.n())?)
}

fn max_abs_on_grid(f: &SpectralScalar) -> Result<f64, VerifierError> {
    let vals = inverse_transform(f)?;
    Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

fn plane_magnitude(f: &SpectralScalar) -> f64 {
    let mut worst = 0.0f64;
    for k in modes(f.n()) {
        if k.k3 == 0 {
            worst = worst.max(f.get(k).norm());
        }
    }
    worst
}

fn mean_plane_part(f: &SpectralScalar) -> SpectralScalar {
    let mut out = f.clone();
    for k in modes(f.n()) {
        if k.k3 != 0 {
            let idx = out.slot_of(k);
            out.coeffs_mut()[idx] = Complex64::new(0.0, 0.0);
        }
    }
    out
}

/// Horizontal solenoidal projection applied plane-of-constant-k3 by
/// plane-of-constant-k3: each mode with nonzero horizontal wavevector loses
/// its component along that wavevector; modes with zero horizontal
/// wavevector pass through.
fn horizontal_leray(
    c1: &SpectralScalar,
    c2: &SpectralScalar,
) -> (SpectralScalar, SpectralScalar) {
    let mut o1 = c1.clone();
    let mut o2 = c2.clone();
    for k in modes(c1.n()) {
        let kk = (k.k1 * k.k1 + k.k2 * k.k2) as f64;
        if kk == 0.0 {
            continue;
        }
        let idx = o1.slot_of(k);
        let a = o1.coeffs()[idx];
        let b = o2.coeffs()[idx];
        let dot = (k.k1 as f64 * a + k.k2 as f64 * b) / kk;
        o1.coeffs_mut()[idx] = a - dot * k.k1 as f64;
        o2.coeffs_mut()[idx] = b - dot * k.k2 as f64;
    }
    (o1, o2)
}

fn validate_radius(tau: f64) -> Result<(), VerifierError> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(VerifierError::BadRadius(tau));
    }
    Ok(())
}

fn validate_exponent(check: &str, r: f64, floor: f64) -> Result<(), VerifierError> {
    if !(r.is_finite() && r > floor) {
        return Err(VerifierError::ExponentRange {
            check: check.to_string(),
            r,
            floor,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Estimate checks.
// ---------------------------------------------------------------------------

/// The trilinear estimate families under verification, named by the term
/// structure on their left side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateKind {
    /// `f . grad g` paired against `h`.
    Advection,
    /// `(div f) g` paired against `h`.
    DivergenceProduct,
    /// `(int_0^z div f ds) dz(g)` paired against `h`; needs `f` free of its
    /// vertical mean.
    VerticalSweep,
    /// Weight moved through the advection product: the difference between
    /// weighting `f . grad g` and advecting the weighted `g`.
    AdvectionCommutator,
    /// Weight moved through the divergence product.
    DivergenceCommutator,
    /// Weight moved onto the `dz(g)` factor of the vertical sweep.
    SweepCommutatorDerivative,
    /// Weight moved onto the integral factor of the vertical sweep.
    SweepCommutatorIntegral,
    /// `f . grad g` paired against `g` itself, with the divergence of `f`
    /// entering in the maximum norm. Above r = 3 the sharper variant with
    /// weight r (instead of r + 1/2) on the first factor is checked.
    SelfAdvection,
}

impl EstimateKind {
    pub fn all() -> [EstimateKind; 8] {
        [
            EstimateKind::Advection,
            EstimateKind::DivergenceProduct,
            EstimateKind::VerticalSweep,
            EstimateKind::AdvectionCommutator,
            EstimateKind::DivergenceCommutator,
            EstimateKind::SweepCommutatorDerivative,
            EstimateKind::SweepCommutatorIntegral,
            EstimateKind::SelfAdvection,
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            EstimateKind::Advection => "advection",
            EstimateKind::DivergenceProduct => "divergence-product",
            EstimateKind::VerticalSweep => "vertical-sweep",
            EstimateKind::AdvectionCommutator => "advection-commutator",
            EstimateKind::DivergenceCommutator => "divergence-commutator",
            EstimateKind::SweepCommutatorDerivative => "sweep-commutator-derivative",
            EstimateKind::SweepCommutatorIntegral => "sweep-commutator-integral",
            EstimateKind::SelfAdvection => "self-advection",
        }
    }

    /// Lower end of the open validity range for the exponent r.
    pub fn r_floor(&self) -> f64 {
        match self {
            EstimateKind::Advection
            | EstimateKind::DivergenceProduct
            | EstimateKind::VerticalSweep => 2.0,
            _ => 2.5,
        }
    }

    /// Whether the first factor must have zero vertical mean.
    pub fn needs_mean_free_first_factor(&self) -> bool {
        matches!(
            self,
            EstimateKind::VerticalSweep
                | EstimateKind::SweepCommutatorDerivative
                | EstimateKind::SweepCommutatorIntegral
        )
    }

    fn notes(&self) -> String {
        let mut parts: Vec<&str> = Vec::new();
        match self {
            EstimateKind::Advection | EstimateKind::DivergenceProduct => {
                parts.push(
                    "mean-zero ensemble: the mean-coefficient term on the right side is \
                     identically zero and unexercised",
                );
            }
            _ => {}
        }
        if self.needs_mean_free_first_factor() {
            parts.push("first factor generated without a vertical-mean plane");
        }
        if matches!(self, EstimateKind::SelfAdvection) {
            parts.push("above r = 3 the sharper first-factor weight r is used in the tau term");
        }
        parts.join("; ")
    }
}

/// Worst observed left/right ratio of one estimate family over an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub check: String,
    pub r: f64,
    pub tau: f64,
    pub max_ratio: f64,
    pub samples: usize,
    pub worst_seed: u64,
    pub notes: String,
}

/// Left/right ratio of one estimate family on explicit fields.
///
/// The right side is evaluated without its uniform constant; a zero left
/// side yields ratio zero. Fields are expected band-limited to the grid's
/// alias-free band so that all products are exact convolutions.
pub fn estimate_ratio(
    kind: EstimateKind,
    sample: &EstimateSample,
    r: f64,
    tau: f64,
) -> Result<f64, VerifierError> {
    validate_exponent(kind.label(), r, kind.r_floor())?;
    validate_radius(tau)?;
    if kind.needs_mean_free_first_factor() {
        let scale = sample.f1.max_abs().max(sample.f2.max_abs()).max(1.0);
        let res = plane_magnitude(&sample.f1).max(plane_magnitude(&sample.f2));
        if res > 1e-10 * scale {
            return Err(VerifierError::Hypothesis(format!(
                "the first factor must have zero vertical mean (plane magnitude {res:.3e})"
            )));
        }
    }

    let f1 = &sample.f1;
    let f2 = &sample.f2;
    let g = &sample.g;
    let h = &sample.h;

    let snp = |rr: f64, tt: f64| weighted_seminorm_pair(f1, f2, rr, tt);
    let sng = |rr: f64, tt: f64| weighted_seminorm(g, rr, tt);
    let snh = |rr: f64, tt: f64| weighted_seminorm(h, rr, tt);

    let (lhs, rhs) = match kind {
        EstimateKind::Advection => {
            let lhs = weighted_inner(&advect(f1, f2, g)?, h, r, tau).abs();
            let mean_mag = (f1.get(WaveVector { k1: 0, k2: 0, k3: 0 }).norm_sqr()
                + f2.get(WaveVector { k1: 0, k2: 0, k3: 0 }).norm_sqr())
            .sqrt();
            let rhs = (snp(r, tau) + mean_mag) * sng(r + 0.5, tau) * snh(r + 0.5, tau)
                + snp(r + 0.5, tau) * sng(r, tau) * snh(r, tau);
            (lhs, rhs)
        }
        EstimateKind::DivergenceProduct => {
            let divf = divergence3(f1, f2);
            let lhs = weighted_inner(&multiply(&divf, g)?, h, r, tau).abs();
            let mean_mag = g.get(WaveVector { k1: 0, k2: 0, k3: 0 }).norm();
            let rhs = (sng(r, tau) + mean_mag) * snp(r + 0.5, tau) * snh(r + 0.5, tau)
                + sng(r + 0.5, tau) * snp(r, tau) * snh(r, tau);
            (lhs, rhs)
        }
        EstimateKind::VerticalSweep => {
            let vf = vertical_integral_div_components(f1, f2)?;
            let dzg = derivative(g, Axis::X3);
            let lhs = weighted_inner(&multiply(&vf, &dzg)?, h, r, tau).abs();
            let rhs = snp(r, tau) * sng(r + 0.5, tau) * snh(r + 0.5, tau)
                + sng(r, tau) * snp(r + 0.5, tau) * snh(r + 0.5, tau)
                + snh(r, tau) * snp(r + 0.5, tau) * sng(r + 0.5, tau);
            (lhs, rhs)
        }
        EstimateKind::AdvectionCommutator => {
            let t1 = weighted_inner(&advect(f1, f2, g)?, h, r, tau);
            let wg = apply_weight(g, r, tau);
            let wh = apply_weight(h, r, tau);
            let t2 = l2_inner(&advect(f1, f2, &wg)?, &wh).re;
            let lhs = (t1 - t2).abs();
            let rhs = snp(r, 0.0) * sng(r, 0.0) * snh(r, 0.0)
                + tau * snp(r + 0.5, tau) * sng(r + 0.5, tau) * snh(r + 0.5, tau);
            (lhs, rhs)
        }
        EstimateKind::DivergenceCommutator => {
            let divf = divergence3(f1, f2);
            let t1 = weighted_inner(&multiply(&divf, g)?, h, r, tau);
            let wh = apply_weight(h, r, tau);
            let t2 = l2_inner(&multiply(&apply_weight(&divf, r, tau), g)?, &wh).re;
            let lhs = (t1 - t2).abs();
            let rhs = snp(r, 0.0) * sng(r, 0.0) * snh(r, 0.0)
                + tau * snp(r + 0.5, tau) * sng(r + 0.5, tau) * snh(r + 0.5, tau);
            (lhs, rhs)
        }
        EstimateKind::SweepCommutatorDerivative => {
            let vf = vertical_integral_div_components(f1, f2)?;
            let dzg = derivative(g, Axis::X3);
            let t1 = weighted_inner(&multiply(&vf, &dzg)?, h, r, tau);
            let wh = apply_weight(h, r, tau);
            let t2 = l2_inner(&multiply(&vf, &apply_weight(&dzg, r, tau))?, &wh).re;
            let lhs = (t1 - t2).abs();
            let rhs = snp(r + 1.0, 0.0) * sng(r, 0.0) * snh(r, 0.0)
                + tau * snp(r + 1.5, tau) * sng(r + 0.5, tau) * snh(r + 0.5, tau);
            (lhs, rhs)
        }
        EstimateKind::SweepCommutatorIntegral => {
            let vf = vertical_integral_div_components(f1, f2)?;
            let dzg = derivative(g, Axis::X3);
            let t1 = weighted_inner(&multiply(&vf, &dzg)?, h, r, tau);
            let wh = apply_weight(h, r, tau);
            let t2 = l2_inner(&multiply(&dzg, &apply_weight(&vf, r, tau))?, &wh).re;
            let lhs = (t1 - t2).abs();
            let rhs = sng(r + 1.0, 0.0) * snp(r, 0.0) * snh(r, 0.0)
                + tau * sng(r + 1.5, tau) * snp(r + 0.5, tau) * snh(r + 0.5, tau);
            (lhs, rhs)
        }
        EstimateKind::SelfAdvection => {
            let lhs = weighted_inner(&advect(f1, f2, g)?, g, r, tau).abs();
            let div_sup = max_abs_on_grid(&divergence3(f1, f2))?;
            let f_weight_r = if r > 3.0 { r } else { r + 0.5 };
            let sg = sng(r, tau);
            let sg_half = sng(r + 0.5, tau);
            let rhs = snp(r, 0.0) * sng(r, 0.0) * sng(r, 0.0)
                + div_sup * sg * sg
                + tau * snp(f_weight_r, tau) * sg_half * sg_half;
            (lhs, rhs)
        }
    };

    if lhs == 0.0 {
        Ok(0.0)
    } else {
        Ok(lhs / rhs)
    }
}

/// Product-algebra ratio `N(fg) / (N(f) N(g))` in the full weighted norm,
/// with the product computed exactly on a padded grid.
pub fn banach_ratio(
    f: &SpectralScalar,
    g: &SpectralScalar,
    r: f64,
    tau: f64,
) -> Result<f64, VerifierError> {
    validate_exponent("banach-algebra", r, 1.5)?;
    validate_radius(tau)?;
    let spec = NormSpec::new(r, tau)?;
    let product = multiply_exact(f, g)?;
    let num = analytic_norm(&product, &spec);
    let den = analytic_norm(f, &spec) * analytic_norm(g, &spec);
    if num == 0.0 {
        Ok(0.0)
    } else {
        Ok(num / den)
    }
}

/// Worst product-algebra ratio over the ensemble.
pub fn check_banach_algebra(
    spec: &EnsembleSpec,
    r: f64,
    tau: f64,
) -> Result<EstimateReport, VerifierError> {
    spec.validate()?;
    validate_exponent("banach-algebra", r, 1.5)?;
    validate_radius(tau)?;
    let mut max_ratio = 0.0f64;
    let mut worst_seed = spec.sample_seed(0);
    for i in 0..spec.samples {
        let seed = spec.sample_seed(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = draw_scalar(&mut rng, spec.n, spec.mode_cap, spec.decay, false);
        let g = draw_scalar(&mut rng, spec.n, spec.mode_cap, spec.decay, false);
        let ratio = banach_ratio(&f, &g, r, tau)?;
        if ratio > max_ratio {
            max_ratio = ratio;
            worst_seed = seed;
        }
    }
    Ok(EstimateReport {
        check: "banach-algebra".to_string(),
        r,
        tau,
        max_ratio,
        samples: spec.samples,
        worst_seed,
        notes: "full-norm product bound on zero-mean fields".to_string(),
    })
}

/// Worst left/right ratio of one estimate family over the ensemble.
pub fn check_nonlinear_estimate(
    kind: EstimateKind,
    spec: &EnsembleSpec,
    r: f64,
    tau: f64,
) -> Result<EstimateReport, VerifierError> {
    spec.validate()?;
    validate_exponent(kind.label(), r, kind.r_floor())?;
    validate_radius(tau)?;
    let mut max_ratio = 0.0f64;
    let mut worst_seed = spec.sample_seed(0);
    for i in 0..spec.samples {
        let seed = spec.sample_seed(i);
        let sample = sample_fields(
            spec.n,
            spec.mode_cap,
            spec.decay,
            seed,
            kind.needs_mean_free_first_factor(),
        );
        let ratio = estimate_ratio(kind, &sample, r, tau)?;
        if ratio > max_ratio {
            max_ratio = ratio;
            worst_seed = seed;
        }
    }
    Ok(EstimateReport {
        check: kind.label().to_string(),
        r,
        tau,
        max_ratio,
        samples: spec.samples,
        worst_seed,
        notes: kind.notes(),
    })
}

/// Exponents of the standard battery: one entry per estimate family, each
/// inside its validity range, with the self-advection entry exercising the
/// sharper branch above r = 3.
pub const STANDARD_TAU: f64 = 0.05;
pub const BANACH_R: f64 = 2.0;
pub const PRODUCT_BOUND_R: f64 = 2.5;
pub const COMMUTATOR_R: f64 = 3.0;
pub const SELF_ADVECTION_R: f64 = 3.5;

fn standard_exponent(kind: EstimateKind) -> f64 {
    match kind {
        EstimateKind::Advection | EstimateKind::DivergenceProduct | EstimateKind::VerticalSweep => {
            PRODUCT_BOUND_R
        }
        EstimateKind::SelfAdvection => SELF_ADVECTION_R,
        _ => COMMUTATOR_R,
    }
}

/// The full estimate battery at the standard exponents.
pub fn standard_estimates(spec: &EnsembleSpec) -> Result<Vec<EstimateReport>, VerifierError> {
    let mut out = Vec::with_capacity(9);
    out.push(check_banach_algebra(spec, BANACH_R, STANDARD_TAU)?);
    for kind in EstimateKind::all() {
        out.push(check_nonlinear_estimate(
            kind,
            spec,
            standard_exponent(kind),
            STANDARD_TAU,
        )?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Identity checks.
// ---------------------------------------------------------------------------

/// Worst relative residual of one exact identity over an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub max_residual: f64,
    pub samples: usize,
    pub worst_seed: u64,
}

/// Exponent and radius at which the weighted-norm identities are evaluated.
const IDENTITY_NORM_R: f64 = 2.0;
const IDENTITY_NORM_TAU: f64 = 0.1;

fn scalar_diff_norm(a: &SpectralScalar, b: &SpectralScalar) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    l2_norm(&d)
}

fn pair_l2(u1: &SpectralScalar, u2: &SpectralScalar) -> f64 {
    l2_norm_pair(u1, u2)
}

struct IdentityAccumulator {
    identity: &'static str,
    max_residual: f64,
    worst_seed: u64,
}

impl IdentityAccumulator {
    fn new(identity: &'static str, first_seed: u64) -> Self {
        IdentityAccumulator {
            identity,
            max_residual: 0.0,
            worst_seed: first_seed,
        }
    }

    fn push(&mut self, residual: f64, seed: u64) {
        if residual > self.max_residual {
            self.max_residual = residual;
            self.worst_seed = seed;
        }
    }
}

/// Checks the exact structural identities sample by sample: partition of a
/// velocity into its mean plane and the two oscillation projections,
/// projector algebra, adjointness of the projections, commutation of the
/// solenoidal projection with vertical averaging, the Pythagorean norm
/// partitions, and the equal energy split between the oscillation halves.
/// Failures appear as large residuals, never as errors.
pub fn check_identities(spec: &EnsembleSpec) -> Result<Vec<IdentityReport>, VerifierError> {
    spec.validate()?;
    let first = spec.sample_seed(0);
    let mut partition = IdentityAccumulator::new("projector-partition", first);
    let mut algebra = IdentityAccumulator::new("projector-algebra", first);
    let mut mean_adjoint = IdentityAccumulator::new("mean-adjoint", first);
    let mut osc_adjoint = IdentityAccumulator::new("oscillation-adjoint", first);
    let mut leray_commute = IdentityAccumulator::new("solenoidal-mean-commutation", first);
    let mut energy_partition = IdentityAccumulator::new("energy-partition", first);
    let mut osc_balance = IdentityAccumulator::new("oscillation-energy-balance", first);

    let nspec = NormSpec::new(IDENTITY_NORM_R, IDENTITY_NORM_TAU)?;

    for i in 0..spec.samples {
        let seed = spec.sample_seed(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v1 = draw_scalar(&mut rng, spec.n, spec.mode_cap, spec.decay, false);
        let v2 = draw_scalar(&mut rng, spec.n, spec.mode_cap, spec.decay, false);
        let w1 = draw_scalar(&mut rng, spec.n, spec.mode_cap, spec.decay, false);
        let w2 = draw_scalar(&mut rng, spec.n, spec.mode_cap, spec.decay, false);
        let hv = HorizontalVelocity {
            comp1: v1.clone(),
            comp2: v2.clone(),
        };
        let hw = HorizontalVelocity {
            comp1: w1.clone(),
            comp2: w2.clone(),
        };
        let v_norm = pair_l2(&v1, &v2).max(1e-300);
        let w_norm = pair_l2(&w1, &w2).max(1e-300);

        let bar = barotropic(&hv);
        let tilde = baroclinic(&hv);
        let up = p_plus(&hv);
        let um = p_minus(&hv);

        // Partition: mean plane plus the two oscillation parts reassemble v.
        let mut s1 = up.c1.clone();
        s1.axpy(1.0, &um.c1);
        let mut s2 = up.c2.clone();
        s2.axpy(1.0, &um.c2);
        let recon = assemble(
            &bar,
            &BaroclinicField {
                c1: s1.clone(),
                c2: s2.clone(),
            },
        );
        let res = (scalar_diff_norm(&recon.comp1, &v1).powi(2)
            + scalar_diff_norm(&recon.comp2, &v2).powi(2))
        .sqrt()
            / v_norm;
        partition.push(res, seed);

        // Projector algebra: idempotence, annihilation of the opposite
        // projection, annihilation of a purely mean-plane velocity.
        let u_norm = pair_l2(&up.c1, &up.c2).max(1e-300);
        let upp = p_plus_complex(&up);
        let upm = p_minus_complex(&up);
        let mean_only = assemble(&bar, &BaroclinicField::zeros(spec.n));
        let up_of_mean = p_plus(&mean_only);
        let r1 = (scalar_diff_norm(&upp.c1, &up.c1).powi(2)
            + scalar_diff_norm(&upp.c2, &up.c2).powi(2))
        .sqrt();
        let r2 = pair_l2(&upm.c1, &upm.c2);
        let r3 = pair_l2(&up_of_mean.c1, &up_of_mean.c2);
        algebra.push(r1.max(r2).max(r3) / u_norm, seed);

        // Vertical-mean averaging is self-adjoint and a projection.
        let p0f = mean_plane_part(&v1);
        let p0g = mean_plane_part(&w1);
        let i1 = l2_inner(&p0f, &w1).re;
        let i2 = l2_inner(&v1, &p0g).re;
        let i3 = l2_inner(&p0f, &p0g).re;
        let scale = (l2_norm(&v1) * l2_norm(&w1)).max(1e-300);
        mean_adjoint.push(((i1 - i2).abs().max((i1 - i3).abs())) / scale, seed);

        // The oscillation projections are mutually adjoint under the real
        // pairing.
        let pmw = p_minus(&hw);
        let lhs = bilinear_pairing_pair((&up.c1, &up.c2), (&w1, &w2));
        let rhs = bilinear_pairing_pair((&v1, &v2), (&pmw.c1, &pmw.c2));
        osc_adjoint.push((lhs - rhs).norm() / (v_norm * w_norm), seed);

        // Solenoidal projection commutes with vertical averaging.
        let path_a = leray2d(&bar.c1, &bar.c2)?;
        let (l1, l2) = horizontal_leray(&v1, &v2);
        let path_b = barotropic(&HorizontalVelocity {
            comp1: l1,
            comp2: l2,
        });
        let mut d1 = path_a.c1.clone();
        d1.axpy(-1.0, &path_b.c1);
        let mut d2 = path_a.c2.clone();
        d2.axpy(-1.0, &path_b.c2);
        let plane_diff: f64 = d1
            .coeffs()
            .iter()
            .chain(d2.coeffs())
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        leray_commute.push(plane_diff / v_norm, seed);

        // Norm partition between the mean plane and the rest, in both the
        // plain and the weighted norm.
        let l2v_sq = v_norm * v_norm;
        let l2bar = l2_norm_bar(&bar);
        let l2tilde = pair_l2(&tilde.c1, &tilde.c2);
        let ra = (l2v_sq - l2bar * l2bar - l2tilde * l2tilde).abs() / l2v_sq;
        let av = analytic_norm_pair(&v1, &v2, &nspec);
        let split = split_analytic_sq(&bar, &tilde, &nspec);
        let rb = (av * av - split).abs() / (av * av);
        energy_partition.push(ra.max(rb), seed);

        // The two oscillation halves carry equal norms, each half of the
        // vertically varying part, in both the plain and the weighted norm.
        let (tp1, tp2) = p_plus_components(&tilde.c1, &tilde.c2);
        let (tm1, tm2) = projections::p_minus_components(&tilde.c1, &tilde.c2);
        let et = (l2tilde * l2tilde).max(1e-300);
        let ep = pair_l2(&tp1, &tp2).powi(2);
        let em = pair_l2(&tm1, &tm2).powi(2);
        let ra = (ep - em).abs() / et;
        let rb = (ep - 0.5 * et).abs() / et;
        let st = weighted_seminorm_pair(&tilde.c1, &tilde.c2, IDENTITY_NORM_R, IDENTITY_NORM_TAU)
            .powi(2)
            .max(1e-300);
        let sp = weighted_seminorm_pair(&tp1, &tp2, IDENTITY_NORM_R, IDENTITY_NORM_TAU).powi(2);
        let sm = weighted_seminorm_pair(&tm1, &tm2, IDENTITY_NORM_R, IDENTITY_NORM_TAU).powi(2);
        let rc = (sp - sm).abs() / st;
        let rd = (sp - 0.5 * st).abs() / st;
        osc_balance.push(ra.max(rb).max(rc).max(rd), seed);
    }

    let reports = [
        partition,
        algebra,
        mean_adjoint,
        osc_adjoint,
        leray_commute,
        energy_partition,
        osc_balance,
    ];
    Ok(reports
        .into_iter()
        .map(|acc| IdentityReport {
            identity: acc.identity.to_string(),
            max_residual: acc.max_residual,
            samples: spec.samples,
            worst_seed: acc.worst_seed,
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Combined report.
// ---------------------------------------------------------------------------

/// Machine-readable summary of a full verification pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ensemble: EnsembleSpec,
    pub identities: Vec<IdentityReport>,
    pub estimates: Vec<EstimateReport>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Runs the identity suite and the standard estimate battery.
pub fn full_verification(spec: &EnsembleSpec) -> Result<VerifyReport, VerifierError> {
    Ok(VerifyReport {
        ensemble: *spec,
        identities: check_identities(spec)?,
        estimates: standard_estimates(spec)?,
    })
}
