//! Configuration types for the simulation runner.
//!
//! Configs are JSON documents. Unknown keys are rejected everywhere so that a
//! typo in a field name fails loudly instead of silently running with a
//! default value.

use std::path::{Path, PathBuf};

use gevrey_diagnostics::NormSpec;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize};
use spectral_core::band_limit;

use crate::RunnerError;

pub const DEFAULT_MEAN_AMPLITUDE: f64 = 0.9;
pub const DEFAULT_DEPTH_AMPLITUDE: f64 = 0.3;
pub const DEFAULT_OUTPUT_STRIDE: usize = 10;
pub const DEFAULT_NORM_R: f64 = 2.0;
pub const DEFAULT_NORM_TAU: f64 = 0.1;

/// Hard cap on the number of time steps a single run may request, so a bad
/// config fails fast instead of spinning for hours.
pub const MAX_STEPS: f64 = 2.0e7;

fn default_stride() -> usize {
    DEFAULT_OUTPUT_STRIDE
}

fn default_norm_r() -> f64 {
    DEFAULT_NORM_R
}

fn default_norm_tau() -> f64 {
    DEFAULT_NORM_TAU
}

fn default_mean_amplitude() -> f64 {
    DEFAULT_MEAN_AMPLITUDE
}

fn default_depth_amplitude() -> f64 {
    DEFAULT_DEPTH_AMPLITUDE
}

/// What a run simulates. Serialized with an `id` tag, e.g.
/// `{"id": "blowup", "lambda": 5.0}`.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum Scenario {
    /// Nonlinear evolution from a fixed deterministic state, optionally with
    /// a seeded random depth-varying perturbation.
    FreeRun {
        mean_amplitude: f64,
        depth_amplitude: f64,
        perturbation: f64,
    },
    /// Shear profile times `sin(2 pi x1)` designed to steepen and trip the
    /// blowup monitor.
    Blowup { lambda: f64 },
    /// Nonlinearity disabled; the state rotates at frequency omega and is
    /// compared against the closed-form rotated solution.
    LinearRotation {
        mean_amplitude: f64,
        depth_amplitude: f64,
    },
    /// Depth-independent initial data; the run is compared against the
    /// standalone depth-averaged solver.
    ReduceToEuler { mean_amplitude: f64 },
    /// Single high vertical mode with rotation-adapted amplitude.
    WellPrepared { tau0: f64, r: f64 },
    /// Sweep over rotation rates, measuring the distance to the averaged
    /// limit system. Data is built once at `omega_ref` and reused for every
    /// entry of `omegas`.
    FastRotation {
        omegas: Vec<f64>,
        tau0: f64,
        r: f64,
        omega_ref: f64,
    },
    /// Sweep over depth-varying amplitudes, measuring doubling times and the
    /// distance to the purely depth-averaged reference run.
    EpsilonSweep {
        epsilons: Vec<f64>,
        tau0: f64,
        r: f64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FreeRunParams {
    #[serde(default = "default_mean_amplitude")]
    mean_amplitude: f64,
    #[serde(default = "default_depth_amplitude")]
    depth_amplitude: f64,
    #[serde(default)]
    perturbation: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BlowupParams {
    lambda: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearRotationParams {
    #[serde(default = "default_mean_amplitude")]
    mean_amplitude: f64,
    #[serde(default = "default_depth_amplitude")]
    depth_amplitude: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReduceToEulerParams {
    #[serde(default = "default_mean_amplitude")]
    mean_amplitude: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WellPreparedParams {
    tau0: f64,
    r: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FastRotationParams {
    omegas: Vec<f64>,
    tau0: f64,
    r: f64,
    omega_ref: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EpsilonSweepParams {
    epsilons: Vec<f64>,
    tau0: f64,
    r: f64,
}

// Internally tagged enums ignore deny_unknown_fields in derived impls, so the
// scenario is deserialized by hand: split off the id, then parse the rest
// into the matching params struct, which does reject unknown keys.
impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: Deserializer<'de>,
    {
        let value = serde_json::Value::deserialize(deserializer)?;
        let obj = value
            .as_object()
            .ok_or_else(|| DeError::custom("scenario must be an object with an \"id\" field"))?;
        let id = obj
            .get("id")
            .and_then(|v| v.as_str())
            .ok_or_else(|| DeError::custom("scenario.id must be a string"))?
            .to_owned();
        let mut rest = obj.clone();
        rest.remove("id");
        let rest = serde_json::Value::Object(rest);
        fn parse<T: serde::de::DeserializeOwned, E: DeError>(
            id: &str,
            value: serde_json::Value,
        ) -> Result<T, E> {
            serde_json::from_value(value)
                .map_err(|e| DeError::custom(format!("scenario {id:?}: {e}")))
        }
        match id.as_str() {
            "free-run" => {
                let p: FreeRunParams = parse(&id, rest)?;
                Ok(Scenario::FreeRun {
                    mean_amplitude: p.mean_amplitude,
                    depth_amplitude: p.depth_amplitude,
                    perturbation: p.perturbation,
                })
            }
            "blowup" => {
                let p: BlowupParams = parse(&id, rest)?;
                Ok(Scenario::Blowup { lambda: p.lambda })
            }
            "linear-rotation" => {
                let p: LinearRotationParams = parse(&id, rest)?;
                Ok(Scenario::LinearRotation {
                    mean_amplitude: p.mean_amplitude,
                    depth_amplitude: p.depth_amplitude,
                })
            }
            "reduce-to-euler" => {
                let p: ReduceToEulerParams = parse(&id, rest)?;
                Ok(Scenario::ReduceToEuler {
                    mean_amplitude: p.mean_amplitude,
                })
            }
            "well-prepared" => {
                let p: WellPreparedParams = parse(&id, rest)?;
                Ok(Scenario::WellPrepared {
                    tau0: p.tau0,
                    r: p.r,
                })
            }
            "fast-rotation" => {
                let p: FastRotationParams = parse(&id, rest)?;
                Ok(Scenario::FastRotation {
                    omegas: p.omegas,
                    tau0: p.tau0,
                    r: p.r,
                    omega_ref: p.omega_ref,
                })
            }
            "epsilon-sweep" => {
                let p: EpsilonSweepParams = parse(&id, rest)?;
                Ok(Scenario::EpsilonSweep {
                    epsilons: p.epsilons,
                    tau0: p.tau0,
                    r: p.r,
                })
            }
            other => Err(DeError::custom(format!(
                "unknown scenario id {other:?}; expected one of free-run, blowup, \
                 linear-rotation, reduce-to-euler, well-prepared, fast-rotation, epsilon-sweep"
            ))),
        }
    }
}

impl Scenario {
    pub fn id(&self) -> &'static str {
        match self {
            Scenario::FreeRun { .. } => "free-run",
            Scenario::Blowup { .. } => "blowup",
            Scenario::LinearRotation { .. } => "linear-rotation",
            Scenario::ReduceToEuler { .. } => "reduce-to-euler",
            Scenario::WellPrepared { .. } => "well-prepared",
            Scenario::FastRotation { .. } => "fast-rotation",
            Scenario::EpsilonSweep { .. } => "epsilon-sweep",
        }
    }

    /// True for scenarios that produce a parameter table via the sweep
    /// subcommand rather than a single time series.
    pub fn is_sweep(&self) -> bool {
        matches!(
            self,
            Scenario::FastRotation { .. } | Scenario::EpsilonSweep { .. }
        )
    }
}

/// One simulation request. See the README for the JSON schema.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Grid resolution per axis; even and at least 8.
    pub n: usize,
    /// Rotation rate.
    #[serde(default)]
    pub omega: f64,
    /// Time step; omitted means a CFL-style step is chosen from the data.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Final time. Zero produces a header-only CSV plus metadata.
    pub t_end: f64,
    pub scenario: Scenario,
    /// Diagnostics are recorded every this many steps (plus the final step).
    #[serde(default = "default_stride")]
    pub output_stride: usize,
    /// Default output directory; the --out flag overrides it.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Apply the high-shell smoothing filter each step.
    #[serde(default)]
    pub filter: bool,
    /// Seed for the optional random perturbation of free-run data.
    #[serde(default)]
    pub seed: u64,
    /// Exponent r of the reported weighted norms.
    #[serde(default = "default_norm_r")]
    pub norm_r: f64,
    /// Radius tau of the reported weighted norms.
    #[serde(default = "default_norm_tau")]
    pub norm_tau: f64,
    /// Write a binary state snapshot at every recorded time, for the compare
    /// subcommand.
    #[serde(default)]
    pub snapshots: bool,
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), RunnerError> {
    if ok {
        Ok(())
    } else {
        Err(RunnerError::Config(msg()))
    }
}

impl SimConfig {
    pub fn norm_spec(&self) -> Result<NormSpec, RunnerError> {
        NormSpec::new(self.norm_r, self.norm_tau)
            .map_err(|e| RunnerError::Config(format!("norm settings: {e}")))
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        require(self.n >= 8 && self.n % 2 == 0, || {
            format!("n must be even and at least 8, got {}", self.n)
        })?;
        require(self.omega.is_finite(), || {
            format!("omega must be finite, got {}", self.omega)
        })?;
        require(self.t_end.is_finite() && self.t_end >= 0.0, || {
            format!("t_end must be finite and nonnegative, got {}", self.t_end)
        })?;
        if let Some(dt) = self.dt {
            require(dt.is_finite() && dt > 0.0, || {
                format!("dt must be finite and positive, got {dt}")
            })?;
            require(self.t_end / dt <= MAX_STEPS, || {
                format!(
                    "t_end / dt = {:.3e} exceeds the step cap {MAX_STEPS:.0e}",
                    self.t_end / dt
                )
            })?;
        }
        require(self.output_stride >= 1, || {
            "output_stride must be at least 1".to_owned()
        })?;
        self.norm_spec()?;
        self.validate_scenario()
    }

    fn validate_scenario(&self) -> Result<(), RunnerError> {
        let band = band_limit(self.n);
        match &self.scenario {
            Scenario::FreeRun {
                mean_amplitude,
                depth_amplitude,
                perturbation,
            } => {
                require(mean_amplitude.is_finite() && depth_amplitude.is_finite(), || {
                    "free-run amplitudes must be finite".to_owned()
                })?;
                require(perturbation.is_finite() && *perturbation >= 0.0, || {
                    "free-run perturbation must be finite and nonnegative".to_owned()
                })
            }
            Scenario::Blowup { lambda } => require(lambda.is_finite() && *lambda > 0.0, || {
                format!("blowup lambda must be finite and positive, got {lambda}")
            }),
            Scenario::LinearRotation {
                mean_amplitude,
                depth_amplitude,
            } => require(mean_amplitude.is_finite() && depth_amplitude.is_finite(), || {
                "linear-rotation amplitudes must be finite".to_owned()
            }),
            Scenario::ReduceToEuler { mean_amplitude } => {
                require(mean_amplitude.is_finite(), || {
                    "reduce-to-euler mean_amplitude must be finite".to_owned()
                })
            }
            Scenario::WellPrepared { tau0, r } => {
                validate_prepared_params(*tau0, *r)?;
                require(self.omega.abs() > std::f64::consts::E, || {
                    format!(
                        "well-prepared data needs |omega| > e so ln|omega| exceeds 1, \
                         got omega = {}",
                        self.omega
                    )
                })?;
                let m = prepared_mode_index(self.omega, *tau0);
                require(m <= band as u64, || {
                    format!(
                        "well-prepared mode |k| = {m} exceeds the dealiased band {band} at n = {}",
                        self.n
                    )
                })
            }
            Scenario::FastRotation {
                omegas,
                tau0,
                r,
                omega_ref,
            } => {
                validate_prepared_params(*tau0, *r)?;
                require(!omegas.is_empty(), || {
                    "fast-rotation omegas must be nonempty".to_owned()
                })?;
                for w in omegas {
                    require(w.is_finite() && w.abs() > 1.0, || {
                        format!("fast-rotation omegas entries need |omega| > 1, got {w}")
                    })?;
                }
                require(
                    omega_ref.is_finite() && omega_ref.abs() > std::f64::consts::E,
                    || format!("fast-rotation omega_ref needs |omega_ref| > e, got {omega_ref}"),
                )?;
                let m = prepared_mode_index(*omega_ref, *tau0);
                require(m <= band as u64, || {
                    format!(
                        "fast-rotation data mode |k| = {m} exceeds the dealiased band {band} \
                         at n = {}",
                        self.n
                    )
                })
            }
            Scenario::EpsilonSweep { epsilons, tau0, r } => {
                validate_prepared_params(*tau0, *r)?;
                require(!epsilons.is_empty(), || {
                    "epsilon-sweep epsilons must be nonempty".to_owned()
                })?;
                for e in epsilons {
                    require(e.is_finite() && *e >= 0.0, || {
                        format!("epsilon-sweep entries must be finite and nonnegative, got {e}")
                    })?;
                }
                Ok(())
            }
        }
    }
}

fn validate_prepared_params(tau0: f64, r: f64) -> Result<(), RunnerError> {
    require(tau0.is_finite() && tau0 > 0.0, || {
        format!("tau0 must be finite and positive, got {tau0}")
    })?;
    require(r.is_finite() && r >= 0.0, || {
        format!("r must be finite and nonnegative, got {r}")
    })
}

/// Mode index used by the rotation-adapted data: ceil(ln|omega| / tau0).
/// A tiny slack is subtracted before the ceiling so that ratios which are
/// integers up to roundoff (for example omega = e^{2 tau0}) land on the
/// integer instead of the next one.
pub fn prepared_mode_index(omega: f64, tau0: f64) -> u64 {
    (omega.abs().ln() / tau0 - 1e-9).ceil().max(1.0) as u64
}

pub fn parse_sim_config(text: &str) -> Result<SimConfig, RunnerError> {
    let config: SimConfig =
        serde_json::from_str(text).map_err(|e| RunnerError::Config(format!("config parse: {e}")))?;
    config.validate()?;
    Ok(config)
}

pub fn load_sim_config(path: &Path) -> Result<SimConfig, RunnerError> {
    let text = std::fs::read_to_string(path)?;
    parse_sim_config(&text)
}

/// Config for the compare subcommand: two snapshot directories plus the norm
/// in which trajectories are compared.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub run_a: PathBuf,
    pub run_b: PathBuf,
    #[serde(default = "default_norm_r")]
    pub r: f64,
    #[serde(default = "default_norm_tau")]
    pub tau: f64,
}

impl CompareConfig {
    pub fn norm_spec(&self) -> Result<NormSpec, RunnerError> {
        NormSpec::new(self.r, self.tau)
            .map_err(|e| RunnerError::Config(format!("norm settings: {e}")))
    }
}

pub fn load_compare_config(path: &Path) -> Result<CompareConfig, RunnerError> {
    let text = std::fs::read_to_string(path)?;
    let config: CompareConfig =
        serde_json::from_str(&text).map_err(|e| RunnerError::Config(format!("config parse: {e}")))?;
    config.norm_spec()?;
    Ok(config)
}

/// Config for the verify-lemmas subcommand.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerifyLemmasConfig {
    pub n: usize,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Largest excited wavenumber; defaults to the dealiased band of n.
    #[serde(default)]
    pub mode_cap: Option<u32>,
    /// Spectral decay rate of the random samples.
    #[serde(default)]
    pub decay: Option<f64>,
    /// Also evaluate the same ensemble law on the doubled grid and report the
    /// largest relative deviation of the estimate ratios.
    #[serde(default)]
    pub compare_refined: bool,
}

pub fn load_verify_config(path: &Path) -> Result<VerifyLemmasConfig, RunnerError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| RunnerError::Config(format!("config parse: {e}")))
}
