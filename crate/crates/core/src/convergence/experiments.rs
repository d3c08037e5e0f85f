use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConvergenceRecord, DatumSpec};
use crate::dynamics::{evolve_nonlinear, evolve_observed, evolve_to_end, SolverConfig};
use crate::error::{domain, Error, Result};
use crate::oracles::sharpness_initial_datum;
use crate::spectral::{lebesgue_norm_h, Field, Lattice, ModelParams};
use crate::transfer::{discretize_dh, l2_torus_error, ContinuumField};

/// Grid and time-step choices shared by the sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    /// Fine reference grid; default `8 * max(M)`.
    pub m_ref: Option<usize>,
    /// Step for both lattice and reference runs.
    pub dt: f64,
    /// Record intervals on `[0, T]` for sup-in-time errors.
    pub records: usize,
    /// Repeat the reference at `dt/2` and `2 M_ref` and require agreement.
    pub validate_reference: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            m_ref: None,
            dt: 1e-3,
            records: 100,
            validate_reference: true,
        }
    }
}

/// Reference self-differences below this are roundoff and always accepted.
const REFERENCE_FLOOR: f64 = 1e-12;

struct Sweep {
    lattices: Vec<Lattice>,
    fine: Lattice,
}

fn prepare(params: &ModelParams, m_list: &[usize], opts: &ExperimentOptions) -> Result<Sweep> {
    params.require_convergence_regime()?;
    if m_list.is_empty() {
        return domain("M_list is empty");
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return domain(format!("M_list {m_list:?} must be strictly increasing"));
    }
    let m_max = *m_list.last().expect("nonempty");
    let m_ref = opts.m_ref.unwrap_or(8 * m_max);
    for &m in m_list {
        if 8 * m > m_ref || m_ref % m != 0 {
            return Err(Error::IncompatibleGrids(format!(
                "M_ref = {m_ref} must be a multiple of M = {m} and at least 8 M"
            )));
        }
    }
    Ok(Sweep {
        lattices: m_list.iter().map(|&m| Lattice::new(m)).collect::<Result<_>>()?,
        fine: Lattice::new(m_ref)?,
    })
}

fn solver(dt: f64, t_end: f64, stride: usize) -> Result<SolverConfig> {
    let dt = if t_end > 0.0 { dt.min(t_end) } else { dt };
    SolverConfig::new(dt, t_end, stride)
}

/// Same record times, half the step.
fn refined(cfg: &SolverConfig) -> Result<SolverConfig> {
    let n = cfg.steps();
    if n == 0 {
        return Ok(*cfg);
    }
    let stride = cfg.record_stride().saturating_mul(2);
    SolverConfig::new(cfg.t_end() / (2 * n) as f64, cfg.t_end(), stride)
}

fn in_lattice_run<T>(m: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::LatticeRun {
        m,
        source: Box::new(e),
    })
}

/// Torus reference at every record of `cfg`, and its self-difference against a
/// run with half the step on twice the grid (`None` if not validated).
fn reference(
    build: &dyn Fn(Lattice) -> Result<ContinuumField>,
    params: &ModelParams,
    fine: Lattice,
    cfg: &SolverConfig,
    validate: bool,
) -> Result<(Vec<ContinuumField>, Option<f64>)> {
    let u0 = build(fine)?;
    let base = evolve_nonlinear(&u0, params, cfg)?.states;
    if !validate {
        return Ok((base, None));
    }
    let fine2 = Lattice::new(2 * fine.m())?;
    let check = evolve_nonlinear(&build(fine2)?, params, &refined(cfg)?)?.states;
    let diff = base
        .iter()
        .zip(&check)
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max);
    Ok((base, Some(diff)))
}

fn accept_reference(record: &mut ConvergenceRecord, self_difference: Option<f64>) -> Result<()> {
    record.reference_self_difference = self_difference;
    if let Some(d) = self_difference {
        let min_err = record.errors.iter().copied().fold(f64::INFINITY, f64::min);
        let threshold = (0.01 * min_err).max(REFERENCE_FLOOR);
        if d > threshold {
            return Err(Error::ReferenceNotConverged {
                self_difference: d,
                threshold,
            });
        }
    }
    Ok(())
}

fn expected_rate(datum: &DatumSpec, params: &ModelParams) -> Option<f64> {
    match datum {
        DatumSpec::Constant { .. } => None,
        DatumSpec::PlaneWave(_) | DatumSpec::Modes { .. } => Some(1.0),
        DatumSpec::RandomSobolev { s, .. } => Some(2.0 * s / (2.0 + params.alpha())),
    }
}

/// `||p_h S_h(t) d_h u0 - S(t) u0||_{L^2(T)}` for each `M`, against a fine torus reference.
pub fn run_continuum_limit(
    datum: &DatumSpec,
    params: &ModelParams,
    t_eval: f64,
    m_list: &[usize],
    opts: &ExperimentOptions,
) -> Result<ConvergenceRecord> {
    let sweep = prepare(params, m_list, opts)?;
    let cfg = solver(opts.dt, t_eval, usize::MAX)?;
    let (states, self_diff) = reference(&|l| datum.build(l), params, sweep.fine, &cfg, opts.validate_reference)?;
    let u_t = states.last().expect("final record");
    let u0 = datum.build(sweep.fine)?;
    let errors = sweep
        .lattices
        .par_iter()
        .map(|&l| {
            in_lattice_run(l.m(), (|| {
                let g = evolve_to_end(&discretize_dh(&u0, l)?, params, &cfg)?;
                l2_torus_error(&g, u_t)
            })())
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut record = ConvergenceRecord::from_errors(m_list.to_vec(), errors, expected_rate(datum, params))?;
    if let Some(Ok(exact)) = datum.exact_solution(params, sweep.fine, t_eval) {
        let dev = exact.distance(u_t);
        if dev > 1e-8 {
            record.warnings.push(format!("reference deviates from the closed form by {dev:.3e}"));
        }
    }
    accept_reference(&mut record, self_diff)?;
    Ok(record)
}

/// `||S_h(t) d_h u0 - d_h S(t) u0||_{L^2_h}` for each `M`.
pub fn run_discrete_norm_convergence(
    datum: &DatumSpec,
    params: &ModelParams,
    t_eval: f64,
    m_list: &[usize],
    opts: &ExperimentOptions,
) -> Result<ConvergenceRecord> {
    let sweep = prepare(params, m_list, opts)?;
    let cfg = solver(opts.dt, t_eval, usize::MAX)?;
    let (states, self_diff) = reference(&|l| datum.build(l), params, sweep.fine, &cfg, opts.validate_reference)?;
    let u_t = states.last().expect("final record");
    let u0 = datum.build(sweep.fine)?;
    let errors = sweep
        .lattices
        .par_iter()
        .map(|&l| {
            in_lattice_run(l.m(), (|| {
                let g = evolve_to_end(&discretize_dh(&u0, l)?, params, &cfg)?;
                let d = g.sub(&discretize_dh(u_t, l)?)?.into_physical();
                lebesgue_norm_h(&d, 2.0)
            })())
        })
        .collect::<Result<Vec<f64>>>()?;
    let expected = match datum {
        DatumSpec::PlaneWave(_) => Some(2.0),
        _ => None,
    };
    let mut record = ConvergenceRecord::from_errors(m_list.to_vec(), errors, expected)?;
    accept_reference(&mut record, self_diff)?;
    Ok(record)
}

/// Sup over the records of `||p_h u_h(t) - u(t)||_{L^2(T)}`, lattice run from `d_h u0`.
fn sup_error_over_time(
    u0: &ContinuumField,
    reference: &[ContinuumField],
    lattice: Lattice,
    params: &ModelParams,
    cfg: &SolverConfig,
    mut monitor: impl FnMut(&Field),
) -> Result<f64> {
    let g0 = discretize_dh(u0, lattice)?;
    let mut i = 0;
    let mut sup = 0.0f64;
    let mut failure = None;
    evolve_observed(&g0, params, cfg, |_, g| {
        monitor(g);
        match l2_torus_error(g, &reference[i]) {
            Ok(e) => sup = sup.max(e),
            Err(e) => failure = Some(e),
        }
        i += 1;
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(sup),
    }
}

fn record_config(t_final: f64, opts: &ExperimentOptions) -> Result<SolverConfig> {
    let records = opts.records.max(1);
    let per_record = ((t_final / records as f64) / opts.dt).ceil().max(1.0) as usize;
    solver(t_final / (records * per_record) as f64, t_final, per_record)
}

/// Result of the sharpness sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub record: ConvergenceRecord,
    /// `alpha / (2 + alpha)`, the exponent of the energy-space estimate.
    pub theorem_rate: f64,
    /// `2 / (2 + alpha)`, the exponent printed in the sharpness statement.
    pub alternative_rate: f64,
    pub k0_values: Vec<i64>,
    /// `||u0^h||_{H^{alpha/2}}` for each `M`.
    pub datum_norms: Vec<f64>,
}

impl SharpnessReport {
    pub fn distance_to_theorem(&self) -> f64 {
        (self.record.fitted_rate - self.theorem_rate).abs()
    }

    pub fn distance_to_alternative(&self) -> f64 {
        (self.record.fitted_rate - self.alternative_rate).abs()
    }
}

/// Sharpness sweep: the datum `eps k0^{-alpha/2} e^{i k0 x}` changes with `h`,
/// and the error is the sup over `[0, T]`.
pub fn run_sharpness_experiment(
    params: &ModelParams,
    t_final: f64,
    eps: f64,
    m_list: &[usize],
    opts: &ExperimentOptions,
) -> Result<SharpnessReport> {
    let sweep = prepare(params, m_list, opts)?;
    let cfg = record_config(t_final, opts)?;
    let alpha = params.alpha();
    let rows = sweep
        .lattices
        .par_iter()
        .map(|&l| {
            let datum = sharpness_initial_datum(l, params, t_final, eps, sweep.fine)?;
            let k0 = datum.k0;
            let amp = datum.amplitude;
            let build = move |fine: Lattice| {
                ContinuumField::from_modes(fine, &[(k0, Complex64::new(2.0 * std::f64::consts::PI * amp, 0.0))])
            };
            let (reference, diff) = reference(&build, params, sweep.fine, &cfg, opts.validate_reference)?;
            let sup = in_lattice_run(
                l.m(),
                sup_error_over_time(&datum.field, &reference, l, params, &cfg, |_| {}),
            )?;
            Ok((sup, diff, k0, datum.field.sobolev_norm(alpha / 2.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let theorem_rate = alpha / (2.0 + alpha);
    let mut record = ConvergenceRecord::from_errors(
        m_list.to_vec(),
        rows.iter().map(|r| r.0).collect(),
        Some(theorem_rate),
    )?;
    let worst = rows.iter().filter_map(|r| r.1).fold(None, |a: Option<f64>, d| Some(a.map_or(d, |a| a.max(d))));
    let datum_norms: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let lo = datum_norms.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = datum_norms.iter().copied().fold(0.0, f64::max);
    if hi > 1.2 * lo {
        record
            .warnings
            .push(format!("datum H^(alpha/2) norms vary from {lo:.4} to {hi:.4}, beyond a factor 1.2"));
    }
    accept_reference(&mut record, worst)?;
    Ok(SharpnessReport {
        record,
        theorem_rate,
        alternative_rate: 2.0 / (2.0 + alpha),
        k0_values: rows.iter().map(|r| r.2).collect(),
        datum_norms,
    })
}

/// Result of a compact-support sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactSupportReport {
    pub record: ConvergenceRecord,
    pub k_max: i64,
    /// Monitor window for the cubic term's spectrum.
    pub k_c: i64,
    /// Largest relative `l^2` fraction of `F_h(|u_h|^2 u_h)` outside `[-k_c, k_c]`.
    pub max_support_leak: f64,
}

/// Tolerance on the monitored support leak.
pub const SUPPORT_LEAK_TOLERANCE: f64 = 1e-8;

fn support_leak(g: &Field, k_c: i64) -> f64 {
    let cubic = g.to_physical().map(|v| v.norm_sqr() * v).into_frequency();
    let l = cubic.lattice();
    let (mut inside, mut outside) = (0.0, 0.0);
    for (k, v) in l.frequencies().zip(cubic.values()) {
        if k.abs() <= k_c {
            inside += v.norm_sqr();
        } else {
            outside += v.norm_sqr();
        }
    }
    let total = inside + outside;
    if total == 0.0 {
        0.0
    } else {
        (outside / total).sqrt()
    }
}

/// Sup-in-time `L^2(T)` error for finitely supported data, with the cubic
/// term's spectral support monitored on every record.
pub fn run_compact_support_experiment(
    modes: &[(i64, Complex64)],
    params: &ModelParams,
    t_final: f64,
    m_list: &[usize],
    opts: &ExperimentOptions,
) -> Result<CompactSupportReport> {
    let datum = DatumSpec::Modes {
        modes: modes.to_vec(),
    };
    let k_max = datum.max_mode().filter(|&k| k > 0).ok_or_else(|| {
        Error::Domain("compact-support datum needs at least one nonzero mode".into())
    })?;
    if let Some(&m) = m_list.iter().find(|&&m| 3 * k_max as usize >= m) {
        return domain(format!("M = {m} must exceed 3 k_max = {}", 3 * k_max));
    }
    let sweep = prepare(params, m_list, opts)?;
    let cfg = record_config(t_final, opts)?;
    let k_c = 3 * k_max;
    let (reference, diff) = reference(&|l| datum.build(l), params, sweep.fine, &cfg, opts.validate_reference)?;
    let u0 = datum.build(sweep.fine)?;
    let rows = sweep
        .lattices
        .par_iter()
        .map(|&l| {
            let mut leak = 0.0f64;
            let sup = sup_error_over_time(&u0, &reference, l, params, &cfg, |g| {
                leak = leak.max(support_leak(g, k_c));
            });
            in_lattice_run(l.m(), sup).map(|s| (s, leak))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut record = ConvergenceRecord::from_errors(m_list.to_vec(), rows.iter().map(|r| r.0).collect(), Some(1.0))?;
    let max_support_leak = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    if max_support_leak > SUPPORT_LEAK_TOLERANCE {
        record.warnings.push(format!(
            "spectrum of |u_h|^2 u_h leaves [-{k_c}, {k_c}]: relative leak {max_support_leak:.3e}"
        ));
    }
    accept_reference(&mut record, diff)?;
    Ok(CompactSupportReport {
        record,
        k_max,
        k_c,
        max_support_leak,
    })
}

/// Coefficient growth across a `k_max` sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmaxSweep {
    pub k_max: Vec<i64>,
    pub coefficients: Vec<f64>,
    /// Log-log slope of coefficient against `k_max`.
    pub fitted_exponent: f64,
    /// `1 - alpha/2`.
    pub expected_exponent: f64,
}

/// For each `k_max`, the single mode `c e^{i k_max x}` with unit `H^{alpha/2}` norm.
///
/// The linear-order coefficient is only visible while `t k_max^3 h` stays
/// small; beyond that the second-order phase error takes over.
pub fn sweep_compact_support_kmax(
    params: &ModelParams,
    t_final: f64,
    k_max_list: &[i64],
    m_list: &[usize],
    opts: &ExperimentOptions,
) -> Result<KmaxSweep> {
    let alpha = params.alpha();
    let mut coefficients = Vec::with_capacity(k_max_list.len());
    for &k in k_max_list {
        if k < 1 {
            return domain("k_max must be positive");
        }
        let raw = DatumSpec::Modes {
            modes: vec![(k, Complex64::new(1.0, 0.0))],
        };
        let norm = raw.build(Lattice::new(4 * k as usize)?)?.sobolev_norm(alpha / 2.0);
        let c = Complex64::new(1.0 / norm, 0.0);
        let rep = run_compact_support_experiment(&[(k, c)], params, t_final, m_list, opts)?;
        // the finest-lattice ratio error / h; the log-log intercept is too
        // sensitive to the preasymptotic curvature at large k_max
        let r = &rep.record;
        coefficients.push(r.errors[r.errors.len() - 1] / r.h_values[r.h_values.len() - 1]);
    }
    let x: Vec<f64> = k_max_list.iter().map(|&k| k as f64).collect();
    let fitted_exponent = if x.len() >= 3 {
        super::fit_power_law(&x, &coefficients)?.rate
    } else {
        f64::NAN
    };
    Ok(KmaxSweep {
        k_max: k_max_list.to_vec(),
        coefficients,
        fitted_exponent,
        expected_exponent: 1.0 - alpha / 2.0,
    })
}
