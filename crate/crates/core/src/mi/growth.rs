use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::theory::{gain, mi_dispersion, GainRegime};
use crate::dynamics::{evolve_observed, SolverConfig};
use crate::error::{domain, Error, Result};
use crate::spectral::{Field, Lattice, ModelParams};

/// Largest perturbation size accepted as "small".
pub const MAX_EPS: f64 = 1e-2;

/// Perturbed continuous wave `A + eps * sum_k phase_k e^{ikx}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CWSpec {
    pub amplitude: f64,
    pub eps: f64,
    /// `(k, unit phase)`.
    pub modes: Vec<(i64, Complex64)>,
}

impl CWSpec {
    pub fn new(amplitude: f64, eps: f64, modes: Vec<(i64, Complex64)>) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return domain(format!("CW amplitude A = {amplitude} must be positive"));
        }
        if !(0.0..=MAX_EPS).contains(&eps) {
            return domain(format!("perturbation eps = {eps} must lie in [0, {MAX_EPS}]"));
        }
        if let Some((k, p)) = modes.iter().find(|(_, p)| (p.norm() - 1.0).abs() > 1e-12) {
            return domain(format!("phase {p} of mode {k} is not unimodular"));
        }
        Ok(Self { amplitude, eps, modes })
    }

    /// `A + eps e^{ikx}` for each `k`, all with phase 1.
    pub fn with_modes(amplitude: f64, eps: f64, ks: &[i64]) -> Result<Self> {
        Self::new(amplitude, eps, ks.iter().map(|&k| (k, Complex64::new(1.0, 0.0))).collect())
    }

    pub fn initial_datum(&self, lattice: Lattice) -> Result<Field> {
        for &(k, _) in &self.modes {
            if !lattice.contains_frequency(k) {
                return Err(Error::Aliased { n: k, m: lattice.m() });
            }
        }
        Ok(Field::from_fn(lattice, |x| {
            let mut v = Complex64::new(self.amplitude, 0.0);
            for &(k, p) in &self.modes {
                v += self.eps * p * Complex64::from_polar(1.0, k as f64 * x);
            }
            v
        }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthStatus {
    /// A slope was fitted over the growth window.
    Growing,
    /// The mode never reached the lower edge of the window.
    Stable,
    /// The window holds fewer than three records.
    UnderResolved,
}

/// Fitted exponential growth of one sideband.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidebandGrowth {
    pub k: i64,
    pub status: GrowthStatus,
    pub slope: Option<f64>,
    /// Linear-theory gain at `k`.
    pub predicted: f64,
    /// `(t_start, t_end)` of the fitted window.
    pub window: Option<(f64, f64)>,
    /// `|F_h u(t, k)| / 2 pi`, the amplitude of `e^{ikx}`, at each record.
    pub amplitudes: Vec<f64>,
}

impl SidebandGrowth {
    pub fn relative_deviation(&self) -> Option<f64> {
        self.slope.map(|s| (s - self.predicted).abs() / self.predicted)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidebandReport {
    pub times: Vec<f64>,
    pub modes: Vec<SidebandGrowth>,
}

/// Least-squares slope of `log a` over the first contiguous run of records
/// with `lo <= a <= hi`.
pub fn growth_window_slope(times: &[f64], amplitudes: &[f64], lo: f64, hi: f64) -> (GrowthStatus, Option<f64>, Option<(f64, f64)>) {
    let Some(start) = amplitudes.iter().position(|&a| a >= lo && a <= hi) else {
        return if amplitudes.iter().any(|&a| a > hi) {
            (GrowthStatus::UnderResolved, None, None)
        } else {
            (GrowthStatus::Stable, None, None)
        };
    };
    let len = amplitudes[start..]
        .iter()
        .take_while(|&&a| a >= lo && a <= hi)
        .count();
    if len < 3 {
        return (GrowthStatus::UnderResolved, None, None);
    }
    let t = &times[start..start + len];
    let y: Vec<f64> = amplitudes[start..start + len].iter().map(|a| a.ln()).collect();
    let n = len as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|v| (v - mt).powi(2)).sum();
    let sty: f64 = t.iter().zip(&y).map(|(a, b)| (a - mt) * (b - my)).sum();
    (GrowthStatus::Growing, Some(sty / stt), Some((t[0], t[len - 1])))
}

/// Evolves the perturbed CW with the full lattice equation and fits the growth
/// rate of each tracked sideband over its window `[10 eps, 0.01 A]`.
pub fn measure_sideband_growth(
    cw: &CWSpec,
    lattice: Lattice,
    params: &ModelParams,
    cfg: &SolverConfig,
    k_track: &[i64],
) -> Result<SidebandReport> {
    for &k in k_track {
        if !lattice.contains_frequency(k) {
            return Err(Error::Aliased { n: k, m: lattice.m() });
        }
    }
    let u0 = cw.initial_datum(lattice)?;
    let mut times = Vec::new();
    let mut amps: Vec<Vec<f64>> = vec![Vec::new(); k_track.len()];
    evolve_observed(&u0, params, cfg, |t, u: &Field| {
        let g = u.to_frequency();
        times.push(t);
        for (a, &k) in amps.iter_mut().zip(k_track) {
            a.push(g.values()[lattice.slot(k)].norm() / (2.0 * PI));
        }
    })?;
    let (lo, hi) = (10.0 * cw.eps, 0.01 * cw.amplitude);
    let h = lattice.h();
    let modes = k_track
        .iter()
        .zip(amps)
        .map(|(&k, amplitudes)| {
            let (status, slope, window) = growth_window_slope(&times, &amplitudes, lo, hi);
            SidebandGrowth {
                k,
                status,
                slope,
                predicted: gain(h, params, cw.amplitude, k as f64),
                window,
                amplitudes,
            }
        })
        .collect();
    Ok(SidebandReport { times, modes })
}

/// One row of a maximum-gain sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub amplitude: f64,
    pub regime: GainRegime,
    pub k_m: i64,
    /// Gain at the integer `k_m`.
    pub omega_theory: f64,
    /// Real-frequency maximum (`A^2` in the interior regime).
    pub omega_prime: f64,
    pub slope_measured: Option<f64>,
    pub status: GrowthStatus,
}

/// Theory and measured growth at `k_m` for each amplitude.
///
/// Each run perturbs `k_m` by `eps` (`k_m = M` is the lattice mode `-M`),
/// uses a step resolving both `Omega_m` and the nonlinear phase, and runs
/// long enough for the sideband to cross its window.
pub fn sweep_max_gain(params: &ModelParams, lattice: Lattice, amplitudes: &[f64], eps: f64) -> Result<Vec<GainRow>> {
    if amplitudes.is_empty() || amplitudes.windows(2).any(|w| w[0] >= w[1]) {
        return domain("amplitude list must be nonempty and strictly ascending");
    }
    amplitudes
        .par_iter()
        .map(|&a| {
            let report = mi_dispersion(lattice, params, a)?;
            let k = lattice.wrap_frequency(report.k_max);
            let mut row = GainRow {
                amplitude: a,
                regime: report.regime,
                k_m: report.k_max,
                omega_theory: report.omega_max,
                omega_prime: report.omega_prime,
                slope_measured: None,
                status: GrowthStatus::Stable,
            };
            if report.omega_max == 0.0 {
                return Ok(row);
            }
            let rate = report.omega_max.max(a * a);
            let dt = (1e-2 / rate).min(1e-3);
            let t_end = ((0.01 * a / eps).ln() + 4.0) / report.omega_max;
            let steps = (t_end / dt).ceil() as usize;
            let cfg = SolverConfig::new(dt, t_end, (steps / 2000).max(1))?;
            let cw = CWSpec::with_modes(a, eps, &[k])?;
            let m = measure_sideband_growth(&cw, lattice, params, &cfg, &[k])?;
            row.slope_measured = m.modes[0].slope;
            row.status = m.modes[0].status;
            Ok(row)
        })
        .collect()
}
