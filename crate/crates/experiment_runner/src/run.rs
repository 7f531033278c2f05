//! Scenario execution: time stepping, per-record diagnostics, and the sweep
//! tables.

use std::cell::RefCell;
use std::path::{Path, PathBuf};

use gevrey_diagnostics::{
    analytic_norm_bar, analytic_norm_pair, default_shell_range, estimate_radius, l2_norm_bar,
    l2_norm_pair, sobolev_norm_bar, sobolev_norm_pair, NormSpec,
};
use pe_dynamics::{
    integrate_pe, linear_rotation_solution, osc_from_pe, pe_from_osc, rotate_baroclinic, step_osc,
    step_pe, suggested_dt, BlowupMonitor, BlowupThresholds, IntegrateOptions, OscState, PEState,
    StopReason,
};
use projections::BaroclinicField;
use resonant_limit::{step_limit, LimitState};
use serde_json::{json, Value};

use crate::config::{Scenario, SimConfig, MAX_STEPS};
use crate::data::{
    blowup_state, composite_state, epsilon_state, standard_mean_flow, well_prepared_state,
};
use crate::io::write_state_snapshot;
use crate::RunnerError;

pub const BASE_COLUMNS: [&str; 8] = [
    "t", "l2_bar", "l2_tilde", "h_bar", "h_tilde", "a_bar", "a_tilde", "tau_hat",
];

/// Relative tolerance of the norm-split cross-check performed at every
/// recorded time.
pub const SPLIT_CHECK_TOL: f64 = 1e-10;

/// Depth-varying sizes below this skip the radius fit and report NaN.
const RADIUS_FLOOR: f64 = 1e-13;

/// One row of the diagnostics time series.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub l2_bar: f64,
    pub l2_tilde: f64,
    pub h_bar: f64,
    pub h_tilde: f64,
    pub a_bar: f64,
    pub a_tilde: f64,
    pub tau_hat: f64,
    pub extras: Vec<f64>,
}

impl DiagnosticRecord {
    pub fn row(&self) -> Vec<f64> {
        let mut row = vec![
            self.t,
            self.l2_bar,
            self.l2_tilde,
            self.h_bar,
            self.h_tilde,
            self.a_bar,
            self.a_tilde,
            self.tau_hat,
        ];
        row.extend_from_slice(&self.extras);
        row
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Completed,
    BlowupTerminated {
        t: f64,
        criterion: String,
        value: f64,
    },
}

impl RunOutcome {
    pub fn to_value(&self) -> Value {
        match self {
            RunOutcome::Completed => json!({"status": "completed"}),
            RunOutcome::BlowupTerminated {
                t,
                criterion,
                value,
            } => json!({
                "status": "blowup-terminated",
                "t": t,
                "criterion": criterion,
                "value": value,
            }),
        }
    }
}

/// Product of a run subcommand: the time series plus bookkeeping.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub extra_columns: Vec<&'static str>,
    pub records: Vec<DiagnosticRecord>,
    pub outcome: RunOutcome,
    pub scenario_report: Value,
}

impl RunResult {
    pub fn columns(&self) -> Vec<String> {
        BASE_COLUMNS
            .iter()
            .map(|s| s.to_string())
            .chain(self.extra_columns.iter().map(|s| s.to_string()))
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.records.iter().map(DiagnosticRecord::row).collect()
    }
}

/// Product of a sweep subcommand: one row per parameter value.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub scenario_report: Value,
}

/// Norms plus the consistency cross-check for one state.
pub fn diagnostic_record(
    state: &PEState,
    spec: &NormSpec,
    extras: Vec<f64>,
) -> Result<DiagnosticRecord, RunnerError> {
    if !state.is_finite() {
        return Err(RunnerError::Numerical(format!(
            "state is not finite at t = {}",
            state.t
        )));
    }
    let r = spec.r;
    let l2_bar = l2_norm_bar(&state.vbar);
    let l2_tilde = l2_norm_pair(&state.vtilde.c1, &state.vtilde.c2);
    let h_bar = sobolev_norm_bar(&state.vbar, r);
    let h_tilde = sobolev_norm_pair(&state.vtilde.c1, &state.vtilde.c2, r);
    let a_bar = analytic_norm_bar(&state.vbar, spec);
    let a_tilde = analytic_norm_pair(&state.vtilde.c1, &state.vtilde.c2, spec);

    // The depth average and the depth-varying part occupy disjoint
    // wavevector sets, so the squared norms of the parts must add up to the
    // squared norm of the assembled field. Computing both sides through
    // different code paths makes this a real consistency check.
    let v = projections::assemble(&state.vbar, &state.vtilde);
    let l2_total = l2_norm_pair(&v.comp1, &v.comp2);
    let a_total = analytic_norm_pair(&v.comp1, &v.comp2, spec);
    for (total, parts, label) in [
        (l2_total, l2_bar.hypot(l2_tilde), "l2"),
        (a_total, a_bar.hypot(a_tilde), "weighted"),
    ] {
        let scale = total.max(parts).max(1e-300);
        if (total - parts).abs() > SPLIT_CHECK_TOL * scale {
            return Err(RunnerError::Numerical(format!(
                "norm split check failed at t = {}: {label} total {total:.17e} vs parts \
                 {parts:.17e}",
                state.t
            )));
        }
    }

    let tau_hat = if l2_tilde > RADIUS_FLOOR {
        estimate_radius(
            &[&state.vtilde.c1, &state.vtilde.c2],
            default_shell_range(state.n()),
        )
        .map(|e| e.tau_hat)
        .unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };

    Ok(DiagnosticRecord {
        t: state.t,
        l2_bar,
        l2_tilde,
        h_bar,
        h_tilde,
        a_bar,
        a_tilde,
        tau_hat,
        extras,
    })
}

/// Step sizes covering (t0, t_end]: full steps of dt plus a short remainder
/// when t_end is not a multiple of dt.
pub fn plan_steps(t0: f64, t_end: f64, dt: f64) -> Result<Vec<f64>, RunnerError> {
    let span = t_end - t0;
    if span <= 1e-14 {
        return Ok(Vec::new());
    }
    let from_span = span / dt;
    if from_span > MAX_STEPS {
        return Err(RunnerError::Config(format!(
            "run would take {from_span:.3e} steps, above the cap {MAX_STEPS:.0e}"
        )));
    }
    let full = (from_span + 1e-9).floor() as usize;
    let mut steps = vec![dt; full];
    let rem = span - full as f64 * dt;
    if rem > 1e-9 * dt {
        steps.push(rem);
    }
    Ok(steps)
}

fn resolve_dt(config: &SimConfig, initial: &PEState) -> Result<f64, RunnerError> {
    match config.dt {
        Some(dt) => Ok(dt),
        None => suggested_dt(initial)
            .map_err(|e| RunnerError::Numerical(format!("automatic step size: {e}"))),
    }
}

/// True when step index i (1-based) out of total should be recorded.
fn is_sample(i: usize, total: usize, stride: usize) -> bool {
    i % stride == 0 || i == total
}

struct SnapshotSink<'a> {
    dir: Option<&'a Path>,
    index: usize,
}

impl<'a> SnapshotSink<'a> {
    fn new(dir: Option<&'a Path>) -> Self {
        SnapshotSink { dir, index: 0 }
    }

    fn write(&mut self, state: &PEState) -> Result<(), RunnerError> {
        if let Some(dir) = self.dir {
            let path: PathBuf = dir.join(format!("snap_{:06}.bin", self.index));
            write_state_snapshot(&path, state)?;
        }
        self.index += 1;
        Ok(())
    }
}

/// Dispatch a time-series scenario. Sweep scenarios are rejected here and
/// handled by `execute_sweep`.
pub fn execute_run(
    config: &SimConfig,
    snapshot_dir: Option<&Path>,
) -> Result<RunResult, RunnerError> {
    config.validate()?;
    let spec = config.norm_spec()?;
    match &config.scenario {
        Scenario::FreeRun {
            mean_amplitude,
            depth_amplitude,
            perturbation,
        } => {
            let initial = composite_state(
                config.n,
                *mean_amplitude,
                *depth_amplitude,
                *perturbation,
                config.seed,
            )?;
            run_integrator(config, &spec, initial, &[], ExtraFn::None, None, true, json!({}), snapshot_dir)
        }
        Scenario::Blowup { lambda } => {
            let initial = blowup_state(config.n, *lambda, config.omega)?;
            let thresholds = BlowupThresholds::default();
            let monitor = BlowupMonitor::new(&initial, thresholds.clone())
                .map_err(|e| RunnerError::Numerical(format!("monitor setup: {e}")))?;
            run_integrator(
                config,
                &spec,
                initial,
                &["gradient_amp", "tail_fraction"],
                ExtraFn::Blowup(monitor),
                Some(thresholds),
                true,
                json!({"lambda": lambda}),
                snapshot_dir,
            )
        }
        Scenario::LinearRotation {
            mean_amplitude,
            depth_amplitude,
        } => {
            let initial =
                composite_state(config.n, *mean_amplitude, *depth_amplitude, 0.0, config.seed)?;
            let reference = initial.clone();
            let omega = config.omega;
            run_integrator(
                config,
                &spec,
                initial,
                &["err_linear"],
                ExtraFn::Linear { reference, omega },
                None,
                false,
                json!({}),
                snapshot_dir,
            )
        }
        Scenario::ReduceToEuler { mean_amplitude } => {
            run_reduce_to_euler(config, &spec, *mean_amplitude, snapshot_dir)
        }
        Scenario::WellPrepared { tau0, r } => {
            let (initial, report) = well_prepared_state(
                config.n,
                config.omega,
                *tau0,
                *r,
                crate::config::DEFAULT_MEAN_AMPLITUDE,
            )?;
            let report = serde_json::to_value(report)
                .map_err(|e| RunnerError::Config(format!("report serialization: {e}")))?;
            run_integrator(config, &spec, initial, &[], ExtraFn::None, None, true, report, snapshot_dir)
        }
        Scenario::FastRotation { .. } | Scenario::EpsilonSweep { .. } => {
            Err(RunnerError::Config(format!(
                "scenario {:?} produces a table; use the sweep subcommand",
                config.scenario.id()
            )))
        }
    }
}

enum ExtraFn {
    None,
    Blowup(BlowupMonitor),
    Linear { reference: PEState, omega: f64 },
}

impl ExtraFn {
    fn compute(&self, state: &PEState) -> Result<Vec<f64>, RunnerError> {
        match self {
            ExtraFn::None => Ok(Vec::new()),
            ExtraFn::Blowup(monitor) => {
                let amp = monitor
                    .gradient_amplification(state)
                    .map_err(|e| RunnerError::Numerical(format!("gradient diagnostics: {e}")))?;
                Ok(vec![amp, monitor.tail_fraction(state)])
            }
            ExtraFn::Linear { reference, omega } => {
                let exact = linear_rotation_solution(reference, *omega, state.t - reference.t);
                let bar = l2_norm_bar(&state.vbar.sub(&exact.vbar));
                let tilde = l2_norm_pair(
                    &state.vtilde.sub(&exact.vtilde).c1,
                    &state.vtilde.sub(&exact.vtilde).c2,
                );
                let size = l2_norm_bar(&reference.vbar)
                    .hypot(l2_norm_pair(&reference.vtilde.c1, &reference.vtilde.c2))
                    .max(1e-300);
                Ok(vec![bar.hypot(tilde) / size])
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_integrator(
    config: &SimConfig,
    spec: &NormSpec,
    initial: PEState,
    extra_columns: &[&'static str],
    extras: ExtraFn,
    monitor: Option<BlowupThresholds>,
    nonlinear: bool,
    scenario_report: Value,
    snapshot_dir: Option<&Path>,
) -> Result<RunResult, RunnerError> {
    let dt = resolve_dt(config, &initial)?;
    let steps = plan_steps(initial.t, config.t_end, dt)?;
    if steps.is_empty() {
        return Ok(RunResult {
            extra_columns: extra_columns.to_vec(),
            records: Vec::new(),
            outcome: RunOutcome::Completed,
            scenario_report,
        });
    }

    let mut opts = IntegrateOptions::new(dt, config.t_end);
    opts.stride = config.output_stride;
    opts.nonlinear = nonlinear;
    opts.filter = config.filter;
    opts.monitor = monitor;

    let records = RefCell::new(Vec::new());
    let deferred: RefCell<Option<RunnerError>> = RefCell::new(None);
    let sink = RefCell::new(SnapshotSink::new(snapshot_dir));
    let observer = |state: &PEState| {
        if deferred.borrow().is_some() {
            return;
        }
        let step = extras
            .compute(state)
            .and_then(|ex| diagnostic_record(state, spec, ex))
            .and_then(|rec| {
                records.borrow_mut().push(rec);
                sink.borrow_mut().write(state)
            });
        if let Err(e) = step {
            *deferred.borrow_mut() = Some(e);
        }
    };

    let (_, reason) = integrate_pe(&initial, config.omega, &opts, observer)
        .map_err(|e| RunnerError::Numerical(format!("integration failed: {e}")))?;
    if let Some(e) = deferred.into_inner() {
        return Err(e);
    }

    let outcome = match reason {
        StopReason::Completed => RunOutcome::Completed,
        StopReason::Blowup(event) => RunOutcome::BlowupTerminated {
            t: event.t,
            criterion: event.criterion,
            value: event.value,
        },
    };
    Ok(RunResult {
        extra_columns: extra_columns.to_vec(),
        records: records.into_inner(),
        outcome,
        scenario_report,
    })
}

fn run_reduce_to_euler(
    config: &SimConfig,
    spec: &NormSpec,
    mean_amplitude: f64,
    snapshot_dir: Option<&Path>,
) -> Result<RunResult, RunnerError> {
    if config.filter {
        return Err(RunnerError::Config(
            "reduce-to-euler compares two solvers in lockstep; the filter is not supported here"
                .to_owned(),
        ));
    }
    let n = config.n;
    let vbar0 = standard_mean_flow(n, mean_amplitude);
    let mut pe = PEState {
        vbar: vbar0.clone(),
        vtilde: BaroclinicField::zeros(n),
        t: 0.0,
    };
    let mut lim = LimitState {
        vbar: vbar0,
        vtilde: BaroclinicField::zeros(n),
        t: 0.0,
    };
    let dt = resolve_dt(config, &pe)?;
    let steps = plan_steps(0.0, config.t_end, dt)?;

    let mut records = Vec::new();
    let mut sink = SnapshotSink::new(snapshot_dir);
    let record =
        |pe: &PEState, lim: &LimitState, records: &mut Vec<DiagnosticRecord>, sink: &mut SnapshotSink| {
            let err_bar = analytic_norm_bar(&pe.vbar.sub(&lim.vbar), spec);
            let diff = pe.vtilde.sub(&lim.vtilde);
            let err_tilde = analytic_norm_pair(&diff.c1, &diff.c2, spec);
            let rec = diagnostic_record(pe, spec, vec![err_bar, err_tilde])?;
            records.push(rec);
            sink.write(pe)
        };

    if !steps.is_empty() {
        record(&pe, &lim, &mut records, &mut sink)?;
        let total = steps.len();
        for (i, h) in steps.iter().enumerate() {
            pe = step_pe(&pe, *h, config.omega, true)
                .map_err(|e| RunnerError::Numerical(format!("step failed: {e}")))?;
            lim = step_limit(&lim, *h)
                .map_err(|e| RunnerError::Numerical(format!("reference step failed: {e}")))?;
            if is_sample(i + 1, total, config.output_stride) {
                record(&pe, &lim, &mut records, &mut sink)?;
            }
        }
    }

    Ok(RunResult {
        extra_columns: vec!["err_euler_bar", "err_euler_tilde"],
        records,
        outcome: RunOutcome::Completed,
        scenario_report: json!({}),
    })
}

/// Dispatch a sweep scenario.
pub fn execute_sweep(config: &SimConfig) -> Result<SweepResult, RunnerError> {
    config.validate()?;
    if config.filter {
        return Err(RunnerError::Config(
            "sweeps compare against reference solvers in lockstep; the filter is not supported"
                .to_owned(),
        ));
    }
    let spec = config.norm_spec()?;
    match &config.scenario {
        Scenario::FastRotation {
            omegas,
            tau0,
            r,
            omega_ref,
        } => sweep_fast_rotation(config, &spec, omegas, *tau0, *r, *omega_ref),
        Scenario::EpsilonSweep { epsilons, tau0, r } => {
            sweep_epsilon(config, &spec, epsilons, *tau0, *r)
        }
        _ => Err(RunnerError::Config(format!(
            "scenario {:?} produces a time series; use the run subcommand",
            config.scenario.id()
        ))),
    }
}

/// Keep the oscillation phase advance per step moderate so the averaging
/// error the sweep measures is resolved rather than drowned by quadrature
/// error of the oscillatory integrands.
fn rotation_limited_dt(base: f64, omega: f64) -> f64 {
    if omega == 0.0 {
        base
    } else {
        base.min(0.25 / omega.abs())
    }
}

fn sweep_fast_rotation(
    config: &SimConfig,
    spec: &NormSpec,
    omegas: &[f64],
    tau0: f64,
    r: f64,
    omega_ref: f64,
) -> Result<SweepResult, RunnerError> {
    let n = config.n;
    let (data, report) = well_prepared_state(
        n,
        omega_ref,
        tau0,
        r,
        crate::config::DEFAULT_MEAN_AMPLITUDE,
    )?;
    let base_dt = resolve_dt(config, &data)?;

    let mut rows = Vec::new();
    for &omega in omegas {
        let dt = rotation_limited_dt(base_dt, omega);
        let steps = plan_steps(0.0, config.t_end, dt)?;
        let mut osc = osc_from_pe(&data, omega);
        let mut lim = LimitState {
            vbar: data.vbar.clone(),
            vtilde: data.vtilde.clone(),
            t: 0.0,
        };
        let mut sup = distance_to_limit(&osc, &lim, spec)?;
        let total = steps.len();
        for (i, h) in steps.iter().enumerate() {
            osc = step_osc(&osc, *h, true)
                .map_err(|e| RunnerError::Numerical(format!("step failed: {e}")))?;
            lim = step_limit(&lim, *h)
                .map_err(|e| RunnerError::Numerical(format!("limit step failed: {e}")))?;
            if is_sample(i + 1, total, config.output_stride) {
                sup = sup.max(distance_to_limit(&osc, &lim, spec)?);
            }
        }
        rows.push(vec![omega, sup]);
    }

    Ok(SweepResult {
        columns: vec!["omega", "e_sup"],
        rows,
        scenario_report: json!({
            "omega_ref": omega_ref,
            "data": serde_json::to_value(report)
                .map_err(|e| RunnerError::Config(format!("report serialization: {e}")))?,
        }),
    })
}

/// Distance between the oscillatory run and the averaged system, measured in
/// the configured weighted norm. The depth-varying reference is carried to
/// the rotating frame before comparison.
fn distance_to_limit(
    osc: &OscState,
    lim: &LimitState,
    spec: &NormSpec,
) -> Result<f64, RunnerError> {
    let pe = pe_from_osc(osc);
    if !pe.is_finite() {
        return Err(RunnerError::Numerical(format!(
            "state is not finite at t = {}",
            pe.t
        )));
    }
    let bar = analytic_norm_bar(&pe.vbar.sub(&lim.vbar), spec);
    let rotated = rotate_baroclinic(&lim.vtilde, osc.omega * pe.t);
    let diff = pe.vtilde.sub(&rotated);
    let tilde = analytic_norm_pair(&diff.c1, &diff.c2, spec);
    Ok(bar + tilde)
}

fn sweep_epsilon(
    config: &SimConfig,
    spec: &NormSpec,
    epsilons: &[f64],
    tau0: f64,
    r: f64,
) -> Result<SweepResult, RunnerError> {
    let n = config.n;
    let doubling_spec = NormSpec::new(r, tau0)
        .map_err(|e| RunnerError::Config(format!("norm settings: {e}")))?;
    let vbar0 = standard_mean_flow(n, crate::config::DEFAULT_MEAN_AMPLITUDE);
    let probe = PEState {
        vbar: vbar0.clone(),
        vtilde: BaroclinicField::zeros(n),
        t: 0.0,
    };
    let dt = resolve_dt(config, &probe)?;
    let steps = plan_steps(0.0, config.t_end, dt)?;

    // The depth-averaged reference is shared by every epsilon: integrate it
    // once and keep the sampled states.
    let mut reference = vec![vbar0.clone()];
    {
        let mut lim = LimitState {
            vbar: vbar0,
            vtilde: BaroclinicField::zeros(n),
            t: 0.0,
        };
        let total = steps.len();
        for (i, h) in steps.iter().enumerate() {
            lim = step_limit(&lim, *h)
                .map_err(|e| RunnerError::Numerical(format!("reference step failed: {e}")))?;
            if is_sample(i + 1, total, config.output_stride) {
                reference.push(lim.vbar.clone());
            }
        }
    }

    let mut rows = Vec::new();
    let mut scales = Vec::new();
    for &eps in epsilons {
        let (mut pe, scale) = epsilon_state(n, eps, tau0, r, crate::config::DEFAULT_MEAN_AMPLITUDE)?;
        scales.push(json!({"epsilon": eps, "seed_scale": scale}));

        let mut sup_error = 0.0f64;
        let mut final_error = 0.0f64;
        let mut doubling_time = f64::INFINITY;
        let mut prev_size = (
            0.0f64,
            analytic_norm_pair(&pe.vtilde.c1, &pe.vtilde.c2, &doubling_spec),
        );
        let mut sample_index = 0usize;
        let observe = |pe: &PEState,
                           sample_index: &mut usize,
                           sup_error: &mut f64,
                           final_error: &mut f64,
                           doubling_time: &mut f64,
                           prev_size: &mut (f64, f64)|
         -> Result<(), RunnerError> {
            if !pe.is_finite() {
                return Err(RunnerError::Numerical(format!(
                    "state is not finite at t = {}",
                    pe.t
                )));
            }
            let vbar_ref = &reference[*sample_index];
            let bar = analytic_norm_bar(&pe.vbar.sub(vbar_ref), spec);
            let tilde = analytic_norm_pair(&pe.vtilde.c1, &pe.vtilde.c2, spec);
            let err = bar + tilde;
            *sup_error = sup_error.max(err);
            *final_error = err;

            let size = analytic_norm_pair(&pe.vtilde.c1, &pe.vtilde.c2, &doubling_spec);
            if doubling_time.is_infinite() && size >= 2.0 * eps && size > 0.0 {
                let (t0, s0) = *prev_size;
                // Interpolate the crossing on a log scale between samples.
                let target = (2.0 * eps).ln();
                let (l0, l1) = (s0.max(1e-300).ln(), size.max(1e-300).ln());
                *doubling_time = if l1 > l0 && pe.t > t0 {
                    t0 + (target - l0) / (l1 - l0) * (pe.t - t0)
                } else {
                    pe.t
                };
            }
            *prev_size = (pe.t, size);
            *sample_index += 1;
            Ok(())
        };

        observe(
            &pe,
            &mut sample_index,
            &mut sup_error,
            &mut final_error,
            &mut doubling_time,
            &mut prev_size,
        )?;
        let total = steps.len();
        for (i, h) in steps.iter().enumerate() {
            pe = step_pe(&pe, *h, config.omega, true)
                .map_err(|e| RunnerError::Numerical(format!("step failed: {e}")))?;
            if is_sample(i + 1, total, config.output_stride) {
                observe(
                    &pe,
                    &mut sample_index,
                    &mut sup_error,
                    &mut final_error,
                    &mut doubling_time,
                    &mut prev_size,
                )?;
            }
        }
        rows.push(vec![eps, doubling_time, sup_error, final_error]);
    }

    Ok(SweepResult {
        columns: vec!["epsilon", "doubling_time", "sup_error", "final_error"],
        rows,
        scenario_report: json!({"seed_scales": scales}),
    })
}
