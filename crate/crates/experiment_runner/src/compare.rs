//! Pointwise comparison of two recorded trajectories.

use gevrey_diagnostics::{analytic_norm_bar, analytic_norm_pair, NormSpec};
use pe_dynamics::PEState;

use crate::RunnerError;

/// Per-time distance between two runs, split by component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRecord {
    pub t: f64,
    pub bar_diff: f64,
    pub tilde_diff: f64,
}

impl CompareRecord {
    pub fn row(&self) -> Vec<f64> {
        vec![self.t, self.bar_diff, self.tilde_diff]
    }
}

/// Compare two sampled trajectories record by record in the weighted norm.
/// The trajectories must share grid size and sample times.
pub fn compare_trajectories(
    a: &[PEState],
    b: &[PEState],
    spec: &NormSpec,
) -> Result<Vec<CompareRecord>, RunnerError> {
    if a.len() != b.len() {
        return Err(RunnerError::Config(format!(
            "trajectory lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut out = Vec::with_capacity(a.len());
    for (i, (sa, sb)) in a.iter().zip(b.iter()).enumerate() {
        if sa.n() != sb.n() {
            return Err(RunnerError::Config(format!(
                "grid sizes differ at record {i}: {} vs {}",
                sa.n(),
                sb.n()
            )));
        }
        let scale = sa.t.abs().max(1.0);
        if (sa.t - sb.t).abs() > 1e-9 * scale {
            return Err(RunnerError::Config(format!(
                "sample times differ at record {i}: {:.17e} vs {:.17e}",
                sa.t, sb.t
            )));
        }
        let bar_diff = analytic_norm_bar(&sa.vbar.sub(&sb.vbar), spec);
        let dt = sa.vtilde.sub(&sb.vtilde);
        let tilde_diff = analytic_norm_pair(&dt.c1, &dt.c2, spec);
        out.push(CompareRecord {
            t: sa.t,
            bar_diff,
            tilde_diff,
        });
    }
    Ok(out)
}
