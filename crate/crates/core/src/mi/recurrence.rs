use serde::{Deserialize, Serialize};

use super::growth::CWSpec;
use crate::dynamics::{evolve_observed, SolverConfig};
use crate::error::{domain, Result};
use crate::spectral::{Field, Lattice, ModelParams};

/// Localization means `||u||_inf > LOCALIZATION_FACTOR * A`.
pub const LOCALIZATION_FACTOR: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceDiagnostic {
    /// `None` when the sup norm never crosses the threshold.
    pub first_localization_time: Option<f64>,
    /// Peak time of each localization event, in order.
    pub recurrence_times: Vec<f64>,
    /// Coefficient of variation of the intervals between peaks; NaN with fewer
    /// than two intervals.
    pub irregularity_index: f64,
}

/// Localization events in a sup-norm history: the first crossing of `2 A`,
/// then every interior local maximum above `2 A` from there on.
pub fn recurrence_diagnostic(times: &[f64], sup_norms: &[f64], amplitude: f64) -> RecurrenceDiagnostic {
    let threshold = LOCALIZATION_FACTOR * amplitude;
    let first_idx = sup_norms.iter().position(|&s| s > threshold);
    let first = first_idx.map(|i| times[i]);
    let peaks: Vec<f64> = match first_idx {
        None => Vec::new(),
        Some(i0) => (i0.max(1)..sup_norms.len().saturating_sub(1))
            .filter(|&i| {
                let s = sup_norms[i];
                s > threshold && s > sup_norms[i - 1] && s >= sup_norms[i + 1]
            })
            .map(|i| times[i])
            .collect(),
    };
    let intervals: Vec<f64> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
    let irregularity_index = if intervals.len() < 2 {
        f64::NAN
    } else {
        let n = intervals.len() as f64;
        let mean = intervals.iter().sum::<f64>() / n;
        let var = intervals.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
        var.sqrt() / mean
    };
    RecurrenceDiagnostic {
        first_localization_time: first,
        recurrence_times: peaks,
        irregularity_index,
    }
}

/// Sup-norm history of a perturbed-CW run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupHistory {
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
}

pub fn sup_history(cw: &CWSpec, lattice: Lattice, params: &ModelParams, cfg: &SolverConfig) -> Result<SupHistory> {
    let u0 = cw.initial_datum(lattice)?;
    let mut times = Vec::new();
    let mut sup_norms = Vec::new();
    evolve_observed(&u0, params, cfg, |t, u: &Field| {
        times.push(t);
        sup_norms.push(u.sup_norm());
    })?;
    Ok(SupHistory { times, sup_norms })
}

/// Runs the CW and applies [`recurrence_diagnostic`].
pub fn run_recurrence(
    cw: &CWSpec,
    lattice: Lattice,
    params: &ModelParams,
    cfg: &SolverConfig,
) -> Result<(SupHistory, RecurrenceDiagnostic)> {
    if cfg.t_end() <= 0.0 {
        return domain("recurrence needs a positive horizon");
    }
    let hist = sup_history(cw, lattice, params, cfg)?;
    let d = recurrence_diagnostic(&hist.times, &hist.sup_norms, cw.amplitude);
    Ok((hist, d))
}
