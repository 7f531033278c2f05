//! Config-driven experiment runner for the rotating primitive-equation
//! laboratory.
//!
//! The library exposes everything the `pe-lab` binary does: JSON configs,
//! deterministic initial data, scenario execution producing diagnostics time
//! series or sweep tables, trajectory comparison, and byte-stable output
//! writing. The binary is a thin dispatcher over these functions.

mod compare;
pub mod config;
pub mod data;
mod io;
mod run;

pub use compare::{compare_trajectories, CompareRecord};
pub use config::{
    load_compare_config, load_sim_config, load_verify_config, parse_sim_config, prepared_mode_index,
    CompareConfig, Scenario, SimConfig, VerifyLemmasConfig,
};
pub use data::{
    baroclinic_seed, blowup_profile_coefficients, blowup_profile_value, blowup_state,
    composite_state, epsilon_state, standard_mean_flow, well_prepared_state, WellPreparedReport,
};
pub use io::{
    csv_document, format_float, load_run_snapshots, read_state_snapshot, write_compare_outputs,
    write_run_outputs, write_state_snapshot, write_sweep_outputs, FORMAT_VERSION,
};
pub use run::{
    diagnostic_record, execute_run, execute_sweep, plan_steps, DiagnosticRecord, RunOutcome,
    RunResult, SweepResult, BASE_COLUMNS, SPLIT_CHECK_TOL,
};

use thiserror::Error;

/// Failure modes of the runner, mapped onto the process exit codes of the
/// CLI: configuration problems exit 2, runtime failures exit 3.
#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Exit code for an error result.
pub fn error_exit_code(err: &RunnerError) -> i32 {
    match err {
        RunnerError::Config(_) => 2,
        RunnerError::Numerical(_) => 3,
        RunnerError::Io(_) => 3,
    }
}

/// Exit code for a finished run: 0 for completion, 4 when the blowup monitor
/// terminated the run early.
pub fn outcome_exit_code(outcome: &RunOutcome) -> i32 {
    match outcome {
        RunOutcome::Completed => 0,
        RunOutcome::BlowupTerminated { .. } => 4,
    }
}
