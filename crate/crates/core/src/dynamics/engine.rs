use std::sync::Arc;

use num_complex::Complex64;
use rustfft::Fft;
use serde::{Deserialize, Serialize};

use super::{Evolvable, SolverConfig};
use crate::error::{Error, Result};
use crate::spectral::transform::plan_pair;
use crate::spectral::{Lattice, ModelParams};

/// `||u||_inf` above which a run is declared blown up.
pub const BLOW_UP_THRESHOLD: f64 = 1e8;

/// Mass and energy at each recorded time.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConservationLog {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
}

impl ConservationLog {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t |M(t) - M(0)| / M(0)`.
    pub fn relative_mass_drift(&self) -> f64 {
        let m0 = self.mass.first().copied().unwrap_or(0.0);
        let d = self.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max);
        if m0 == 0.0 {
            d
        } else {
            d / m0
        }
    }

    /// `|H(t_end) - H(0)|`.
    pub fn final_energy_drift(&self) -> f64 {
        match (self.energy.first(), self.energy.last()) {
            (Some(a), Some(b)) => (b - a).abs(),
            _ => 0.0,
        }
    }

    fn push(&mut self, t: f64, mass: f64, energy: f64) {
        self.times.push(t);
        self.mass.push(mass);
        self.energy.push(energy);
    }
}

/// Recorded states plus their conservation log.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub log: ConservationLog,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }
}

/// Strang split-step engine on raw FFT bins.
///
/// The samples are kept in site order, which is a cyclic shift of the raw FFT
/// input; the shift contributes a phase `(-1)^k` that cancels between the
/// forward and inverse transform, so diagonal multipliers act on raw bins directly.
struct SplitStep {
    mu: f64,
    half_dt: f64,
    linear: Vec<Complex64>,
    keep: Option<Vec<bool>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    norm: f64,
}

impl SplitStep {
    fn new<S: Evolvable>(grid: Lattice, params: &ModelParams, dt: f64) -> Self {
        let n = grid.len();
        let bin_frequency = |b: usize| grid.wrap_frequency(b as i64);
        let linear = (0..n)
            .map(|b| Complex64::from_polar(1.0, -dt * S::symbol(grid, params, bin_frequency(b))))
            .collect();
        let keep = S::bandlimit(grid)
            .map(|kmax| (0..n).map(|b| bin_frequency(b).unsigned_abs() as usize <= kmax).collect());
        let (fwd, inv) = plan_pair(n);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        let scratch = vec![Complex64::new(0.0, 0.0); len];
        Self {
            mu: params.mu(),
            half_dt: 0.5 * dt,
            linear,
            keep,
            fwd,
            inv,
            scratch,
            norm: 1.0 / n as f64,
        }
    }

    fn nonlinear_half(&self, u: &mut [Complex64]) {
        let c = -self.mu * self.half_dt;
        for v in u.iter_mut() {
            *v *= Complex64::from_polar(1.0, c * v.norm_sqr());
        }
    }

    fn project(&mut self, u: &mut [Complex64]) {
        if let Some(keep) = &self.keep {
            self.fwd.process_with_scratch(u, &mut self.scratch);
            for (v, &k) in u.iter_mut().zip(keep) {
                *v = if k { *v * self.norm } else { Complex64::new(0.0, 0.0) };
            }
            self.inv.process_with_scratch(u, &mut self.scratch);
        }
    }

    fn step(&mut self, u: &mut [Complex64]) {
        self.nonlinear_half(u);
        self.fwd.process_with_scratch(u, &mut self.scratch);
        match &self.keep {
            Some(keep) => {
                for ((v, l), &k) in u.iter_mut().zip(&self.linear).zip(keep) {
                    *v = if k { *v * l * self.norm } else { Complex64::new(0.0, 0.0) };
                }
            }
            None => {
                for (v, l) in u.iter_mut().zip(&self.linear) {
                    *v *= l * self.norm;
                }
            }
        }
        self.inv.process_with_scratch(u, &mut self.scratch);
        self.nonlinear_half(u);
        self.project(u);
    }
}

/// Largest modulus; NaN if any entry is not a number.
fn sup_norm(u: &[Complex64]) -> f64 {
    let mut m = 0.0f64;
    for v in u {
        let a = v.norm();
        if a.is_nan() {
            return f64::NAN;
        }
        m = m.max(a);
    }
    m
}

/// Evolves `u0` and calls `observe(t, state)` at every record (step 0, every
/// `record_stride` steps, and the final step). Returns the final state and the
/// conservation log.
pub fn evolve_observed<S: Evolvable>(
    u0: &S,
    params: &ModelParams,
    cfg: &SolverConfig,
    mut observe: impl FnMut(f64, &S),
) -> Result<(S, ConservationLog)> {
    let grid = u0.grid();
    let steps = cfg.steps();
    let dt = cfg.effective_dt();
    let mut engine = SplitStep::new::<S>(grid, params, dt);
    let mut u = u0.site_values();
    engine.project(&mut u);
    let mut log = ConservationLog::default();
    let mut record = |t: f64, u: &[Complex64], log: &mut ConservationLog| -> S {
        let s = S::from_site_values(grid, u.to_vec());
        log.push(t, s.mass(), s.energy(params));
        observe(t, &s);
        s
    };
    let mut last = record(0.0, &u, &mut log);
    for n in 1..=steps {
        engine.step(&mut u);
        let t = n as f64 * dt;
        let sup = sup_norm(&u);
        if !(sup <= BLOW_UP_THRESHOLD) {
            return Err(Error::BlowUp { time: t, sup_norm: sup });
        }
        if n % cfg.record_stride() == 0 || n == steps {
            last = record(t, &u, &mut log);
        }
    }
    Ok((last, log))
}

/// Evolves `u0` and keeps every recorded state.
pub fn evolve_nonlinear<S: Evolvable + Clone>(
    u0: &S,
    params: &ModelParams,
    cfg: &SolverConfig,
) -> Result<Trajectory<S>> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let (_, log) = evolve_observed(u0, params, cfg, |t, s| {
        times.push(t);
        states.push(s.clone());
    })?;
    Ok(Trajectory { times, states, log })
}

/// Final state only.
pub fn evolve_to_end<S: Evolvable>(u0: &S, params: &ModelParams, cfg: &SolverConfig) -> Result<S> {
    evolve_observed(u0, params, cfg, |_, _| {}).map(|(s, _)| s)
}
