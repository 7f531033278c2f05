//! Output writing: CSV time series, metadata sidecars, and state snapshots.
//!
//! Everything written here is byte-deterministic for a fixed config: floats
//! are formatted with 17 significant digits, key order is fixed by struct
//! definitions, and line endings are plain newlines.

use std::path::{Path, PathBuf};

use pe_dynamics::PEState;
use projections::{BaroclinicField, BarotropicField, SpectralPlane};
use serde_json::{json, Value};

use crate::config::SimConfig;
use crate::run::{RunResult, SweepResult};
use crate::RunnerError;

/// Current layout version of metadata.json.
pub const FORMAT_VERSION: u32 = 1;

/// Render a float with 17 significant digits, enough to round-trip f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Build a CSV document from a header and rows of floats.
pub fn csv_document(columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format_float(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn metadata_document(
    command: &str,
    columns: &[String],
    records: usize,
    outcome: Value,
    scenario_report: Value,
    config: Value,
) -> Result<String, RunnerError> {
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "tool": "pe-lab",
        "command": command,
        "columns": columns,
        "records": records,
        "outcome": outcome,
        "scenario_report": scenario_report,
        "config": config,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| RunnerError::Config(format!("metadata serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn config_value(config: &SimConfig) -> Result<Value, RunnerError> {
    serde_json::to_value(config)
        .map_err(|e| RunnerError::Config(format!("config serialization: {e}")))
}

/// Write diagnostics.csv and metadata.json for a run result.
pub fn write_run_outputs(
    dir: &Path,
    config: &SimConfig,
    result: &RunResult,
) -> Result<(), RunnerError> {
    std::fs::create_dir_all(dir)?;
    let columns = result.columns();
    let csv = csv_document(&columns, &result.rows());
    std::fs::write(dir.join("diagnostics.csv"), csv)?;
    let meta = metadata_document(
        "run",
        &columns,
        result.records.len(),
        result.outcome.to_value(),
        result.scenario_report.clone(),
        config_value(config)?,
    )?;
    std::fs::write(dir.join("metadata.json"), meta)?;
    Ok(())
}

/// Write sweep.csv and metadata.json for a sweep result.
pub fn write_sweep_outputs(
    dir: &Path,
    config: &SimConfig,
    result: &SweepResult,
) -> Result<(), RunnerError> {
    std::fs::create_dir_all(dir)?;
    let columns: Vec<String> = result.columns.iter().map(|s| s.to_string()).collect();
    let csv = csv_document(&columns, &result.rows);
    std::fs::write(dir.join("sweep.csv"), csv)?;
    let meta = metadata_document(
        "sweep",
        &columns,
        result.rows.len(),
        json!({"status": "completed"}),
        result.scenario_report.clone(),
        config_value(config)?,
    )?;
    std::fs::write(dir.join("metadata.json"), meta)?;
    Ok(())
}

/// Write compare.csv and metadata.json for a trajectory comparison.
pub fn write_compare_outputs(
    dir: &Path,
    config_echo: Value,
    rows: &[Vec<f64>],
) -> Result<(), RunnerError> {
    std::fs::create_dir_all(dir)?;
    let columns: Vec<String> = ["t", "bar_diff", "tilde_diff"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let csv = csv_document(&columns, rows);
    std::fs::write(dir.join("compare.csv"), csv)?;
    let meta = metadata_document(
        "compare",
        &columns,
        rows.len(),
        json!({"status": "completed"}),
        json!({}),
        config_echo,
    )?;
    std::fs::write(dir.join("metadata.json"), meta)?;
    Ok(())
}

/// Persist a split state as a four-component coefficient snapshot. The two
/// depth-averaged components are stored broadcast to the full grid so one
/// container format covers everything; the sidecar carries the time.
pub fn write_state_snapshot(path: &Path, state: &PEState) -> Result<(), RunnerError> {
    let bar1 = state.vbar.c1.broadcast();
    let bar2 = state.vbar.c2.broadcast();
    let meta = json!({
        "kind": "pe-state",
        "t": state.t,
        "components": ["vbar1", "vbar2", "vtilde1", "vtilde2"],
    });
    spectral_core::write_snapshot(
        path,
        &[&bar1, &bar2, &state.vtilde.c1, &state.vtilde.c2],
        &meta,
    )
    .map_err(|e| RunnerError::Numerical(format!("snapshot write: {e}")))
}

/// Load a state snapshot written by `write_state_snapshot`.
pub fn read_state_snapshot(path: &Path) -> Result<PEState, RunnerError> {
    let (components, meta) = spectral_core::read_snapshot(path)
        .map_err(|e| RunnerError::Config(format!("snapshot read {path:?}: {e}")))?;
    if components.len() != 4 {
        return Err(RunnerError::Config(format!(
            "snapshot {path:?} has {} components, expected 4",
            components.len()
        )));
    }
    let t = meta
        .get("meta")
        .and_then(|m| m.get("t"))
        .and_then(|v| v.as_f64())
        .ok_or_else(|| {
            RunnerError::Config(format!("snapshot {path:?} sidecar is missing the time"))
        })?;
    let vbar = BarotropicField {
        c1: SpectralPlane::from_plane_of(&components[0]),
        c2: SpectralPlane::from_plane_of(&components[1]),
    };
    let vtilde = BaroclinicField {
        c1: components[2].clone(),
        c2: components[3].clone(),
    };
    Ok(PEState { vbar, vtilde, t })
}

/// Load every snapshot in a run directory, ordered by file name.
pub fn load_run_snapshots(dir: &Path) -> Result<Vec<PEState>, RunnerError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .map(|s| s.starts_with("snap_") && s.ends_with(".bin"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(RunnerError::Config(format!(
            "no snapshots found in {dir:?}; run with \"snapshots\": true first"
        )));
    }
    paths.iter().map(|p| read_state_snapshot(p)).collect()
}
