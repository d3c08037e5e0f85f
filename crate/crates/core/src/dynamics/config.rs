use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{symbol_sigma_h, Lattice, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Half nonlinear phase, full linear multiplier, half nonlinear phase.
    #[default]
    StrangSplitStep,
}

/// Time-stepping parameters. The number of steps is `t_end / dt` rounded up,
/// and the step actually taken is `t_end / steps` so the run ends exactly at `t_end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    dt: f64,
    t_end: f64,
    record_stride: usize,
    #[serde(default)]
    scheme: Scheme,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64, record_stride: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt = {dt} must be positive and finite")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::Config(format!("t_end = {t_end} must be nonnegative and finite")));
        }
        if t_end > 0.0 && dt > t_end {
            return Err(Error::Config(format!("dt = {dt} exceeds t_end = {t_end}")));
        }
        if record_stride == 0 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        Ok(Self {
            dt,
            t_end,
            record_stride,
            scheme: Scheme::StrangSplitStep,
        })
    }

    /// Uses [`SolverConfig::default_dt`] (capped at `t_end`).
    pub fn with_default_dt(
        lattice: Lattice,
        params: &ModelParams,
        t_end: f64,
        record_stride: usize,
    ) -> Result<Self> {
        let mut dt = Self::default_dt(lattice, params);
        if t_end > 0.0 {
            dt = dt.min(t_end);
        }
        Self::new(dt, t_end, record_stride)
    }

    /// `0.1 * min(1, 1 / sigma_h(M))`: the fastest lattice phase turns at most 0.1 rad per step.
    pub fn default_dt(lattice: Lattice, params: &ModelParams) -> f64 {
        let top = symbol_sigma_h(lattice, params.alpha(), lattice.m() as i64);
        0.1 * (1.0f64).min(1.0 / top)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn record_stride(&self) -> usize {
        self.record_stride
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Self::new(dt, self.t_end, self.record_stride)
    }

    pub fn with_t_end(&self, t_end: f64) -> Result<Self> {
        Self::new(self.dt.min(t_end.max(f64::MIN_POSITIVE)), t_end, self.record_stride)
    }

    pub fn with_record_stride(&self, record_stride: usize) -> Result<Self> {
        Self::new(self.dt, self.t_end, record_stride)
    }

    pub fn steps(&self) -> usize {
        if self.t_end == 0.0 {
            return 0;
        }
        let r = self.t_end / self.dt;
        let n = if (r - r.round()).abs() < 1e-6 * r.max(1.0) {
            r.round()
        } else {
            r.ceil()
        };
        (n as usize).max(1)
    }

    pub fn effective_dt(&self) -> f64 {
        match self.steps() {
            0 => 0.0,
            n => self.t_end / n as f64,
        }
    }
}
