//! Experiment orchestration. Each experiment writes its tables through one
//! [`Ctx`], so file output never depends on worker scheduling.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use fdnls_core::convergence::{
    run_compact_support_experiment, run_continuum_limit, run_discrete_norm_convergence, run_sharpness_experiment,
    ConvergenceRecord, DatumSpec, ExperimentOptions, SUPPORT_LEAK_TOLERANCE,
};
use fdnls_core::dispersive::{blowup_wavepacket_demo, dispersive_bound_check, strichartz_smoke, TimeGrid};
use fdnls_core::dynamics::{evolve_nonlinear, evolve_to_end, write_conservation_csv, write_trajectory_ndjson};
use fdnls_core::mi::{
    instability_region, measure_sideband_growth, omega_sq, recurrence_diagnostic, sup_history, sweep_max_gain,
    GrowthStatus,
};
use fdnls_core::oracles::{plane_wave_continuum, plane_wave_discrete, predicted_error_coefficients};
use fdnls_core::spectral::{lebesgue_norm_h, Lattice, ModelParams};
use fdnls_core::transfer::{discretize_dh, l2_torus_error};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{Experiment, NormChoice, RunConfig};
use crate::manifest::{Check, ErrorRecord, Stage};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] fdnls_core::Error),
    #[error("could not write {path}: {message}")]
    Write { path: PathBuf, message: String },
}

impl RunError {
    pub fn stage(&self) -> Stage {
        match self {
            RunError::Model(_) => Stage::Run,
            RunError::Write { .. } => Stage::Write,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let kind = match self {
            RunError::Model(e) => model_error_kind(e),
            RunError::Write { .. } => "io",
        };
        ErrorRecord {
            kind: kind.into(),
            message: self.to_string(),
        }
    }
}

fn model_error_kind(e: &fdnls_core::Error) -> &'static str {
    use fdnls_core::Error::*;
    match e {
        Representation { .. } => "representation",
        Domain(_) => "domain",
        IncompatibleGrids(_) => "incompatible-grids",
        Aliased { .. } => "aliased",
        Resolution { .. } => "resolution",
        BlowUp { .. } => "blow-up",
        LatticeRun { source, .. } => model_error_kind(source),
        ReferenceNotConverged { .. } => "reference-not-converged",
        Config(_) => "solver-config",
    }
}

/// What a finished (or aborted) run leaves behind, minus the manifest itself.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub summary: Map<String, Value>,
    pub seeds: Map<String, Value>,
    pub artifacts: Vec<String>,
    pub error: Option<RunError>,
}

struct Ctx<'a> {
    dir: &'a Path,
    out: Outcome,
}

impl Ctx<'_> {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>, RunError> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| write_error(&path, e))?;
        self.out.artifacts.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    fn csv<F>(&mut self, name: &str, body: F) -> Result<(), RunError>
    where
        F: FnOnce(BufWriter<File>) -> csv::Result<()>,
    {
        let w = self.create(name)?;
        body(w).map_err(|e| write_error(&self.dir.join(name), e))
    }

    /// Header then rows, each row serialized as a tuple.
    fn table<R: serde::Serialize>(&mut self, name: &str, header: &[&str], rows: &[R]) -> Result<(), RunError> {
        self.csv(name, |w| {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(header)?;
            for r in rows {
                out.serialize(r)?;
            }
            out.flush()?;
            Ok(())
        })
    }

    fn json(&mut self, name: &str, v: &Value) -> Result<(), RunError> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(v).expect("json value serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| write_error(&path, e))?;
        self.out.artifacts.push(name.to_string());
        Ok(())
    }

    fn check(&mut self, c: Check) {
        self.out.checks.push(c);
    }

    fn note(&mut self, key: &str, v: Value) {
        self.out.summary.insert(key.to_string(), v);
    }
}

fn write_error(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Runs `cfg.experiment`, writing artifacts into `dir` (which must exist).
pub fn run_experiment(cfg: &RunConfig, dir: &Path) -> Outcome {
    let mut ctx = Ctx {
        dir,
        out: Outcome::default(),
    };
    let r = match cfg.experiment {
        Experiment::Simulate => simulate(cfg, &mut ctx),
        Experiment::Converge => converge(cfg, &mut ctx),
        Experiment::Sharpness => sharpness(cfg, &mut ctx),
        Experiment::CompactSupport => compact_support(cfg, &mut ctx),
        Experiment::MiRegion => mi_region(cfg, &mut ctx),
        Experiment::MiGain => mi_gain(cfg, &mut ctx),
        Experiment::MiTrack => mi_track(cfg, &mut ctx),
        Experiment::KernelProbe => kernel_probe(cfg, &mut ctx),
        Experiment::OracleCheck => oracle_check(cfg, &mut ctx),
    };
    ctx.out.error = r.err();
    ctx.out
}

fn options(cfg: &RunConfig) -> ExperimentOptions {
    ExperimentOptions {
        m_ref: cfg.m_ref,
        dt: cfg.sweep_dt(),
        records: cfg.convergence.records,
        validate_reference: cfg.convergence.validate_reference,
    }
}

fn record_datum_seed(ctx: &mut Ctx, d: &DatumSpec) {
    if let DatumSpec::RandomSobolev { seed, .. } = d {
        ctx.out.seeds.insert("datum".into(), json!(seed));
    }
}

fn write_record(ctx: &mut Ctx, r: &ConvergenceRecord, extra: Value) -> Result<(), RunError> {
    ctx.csv("convergence.csv", |w| r.write_csv(w))?;
    let mut summary = r.summary();
    if let (Value::Object(s), Value::Object(e)) = (&mut summary, extra) {
        s.extend(e);
    }
    ctx.json("summary.json", &summary)?;
    ctx.note("fit", summary);
    Ok(())
}

fn rate_check(ctx: &mut Ctx, r: &ConvergenceRecord, tolerance: f64) {
    match r.expected_rate {
        Some(_) if r.is_degenerate() => ctx.check(Check::flag("error identically zero (degenerate case)", true)),
        Some(p) => ctx.check(Check::within("fitted rate", r.fitted_rate, p, tolerance)),
        None => {}
    }
}

fn simulate(cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), RunError> {
    let params = cfg.params();
    let lattice = cfg.lattice();
    let solver = cfg.solver_config();
    let (u0, cw) = match &cfg.datum {
        Some(_) => {
            let d = cfg.datum_or_default();
            record_datum_seed(ctx, &d);
            let fine = Lattice::new(cfg.m_ref.unwrap_or(4 * cfg.m))?;
            (discretize_dh(&d.build(fine)?, lattice)?, None)
        }
        None => {
            let cw = cfg.cw_spec();
            (cw.initial_datum(lattice)?, Some(cw))
        }
    };
    let traj = evolve_nonlinear(&u0, &params, &solver)?;
    {
        let w = ctx.create("trajectory.ndjson")?;
        write_trajectory_ndjson(w, &traj.times, &traj.states)
            .map_err(|e| write_error(&ctx.dir.join("trajectory.ndjson"), e))?;
    }
    ctx.csv("conservation.csv", |w| write_conservation_csv(w, &traj.log))?;
    let mass_drift = traj.log.relative_mass_drift();
    ctx.note("records", json!(traj.times.len()));
    ctx.note("dt", json!(solver.effective_dt()));
    ctx.note("relative_mass_drift", json!(mass_drift));
    ctx.note("final_energy_drift", json!(traj.log.final_energy_drift()));
    ctx.check(Check::at_most("relative mass drift", mass_drift, 1e-10));
    if let Some(cw) = cw.filter(|c| c.eps == 0.0) {
        let a = cw.amplitude;
        let dev = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, u)| {
                let exact = Complex64::from_polar(a, -params.mu() * a * a * t);
                u.to_physical().values().iter().map(|v| (v - exact).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        ctx.note("max_deviation_from_cw", json!(dev));
        ctx.check(Check::at_most("deviation from A exp(-i mu A^2 t)", dev, 1e-8));
    }
    Ok(())
}

fn converge(cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), RunError> {
    let params = cfg.params();
    let datum = cfg.datum_or_default();
    record_datum_seed(ctx, &datum);
    let t = cfg.solver.t_end;
    let opts = options(cfg);
    let r = match cfg.convergence.norm {
        NormChoice::Continuum => run_continuum_limit(&datum, &params, t, &cfg.m_list, &opts)?,
        NormChoice::Discrete => run_discrete_norm_convergence(&datum, &params, t, &cfg.m_list, &opts)?,
    };
    let mut extra = json!({ "norm": cfg.convergence.norm, "t": t });
    if let DatumSpec::PlaneWave(spec) = &datum {
        let c = predicted_error_coefficients(spec, &params, t);
        extra["predicted_coefficient"] = json!(match cfg.convergence.norm {
            NormChoice::Continuum => c.continuum,
            NormChoice::Discrete => c.discrete,
        });
    }
    write_record(ctx, &r, extra)?;
    rate_check(ctx, &r, cfg.convergence.rate_tolerance);
    Ok(())
}

fn sharpness(cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), RunError> {
    let params = cfg.params();
    let rep = run_sharpness_experiment(&params, cfg.solver.t_end, cfg.sharpness.eps, &cfg.m_list, &options(cfg))?;
    let extra = json!({
        "theorem_rate": rep.theorem_rate,
        "alternative_rate": rep.alternative_rate,
        "distance_to_theorem": rep.distance_to_theorem(),
        "distance_to_alternative": rep.distance_to_alternative(),
        "k0_values": rep.k0_values,
        "datum_norms": rep.datum_norms,
    });
    write_record(ctx, &rep.record, extra)?;
    ctx.check(Check::within("rate vs alpha/(2+alpha)", rep.record.fitted_rate, rep.theorem_rate, 0.07));
    Ok(())
}

fn compact_support(cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), RunError> {
    let params = cfg.params();
    let rep = run_compact_support_experiment(
        &cfg.compact_support.modes,
        &params,
        cfg.solver.t_end,
        &cfg.m_list,
        &options(cfg),
    )?;
    let extra = json!({ "k_max": rep.k_max, "k_c": rep.k_c, "max_support_leak": rep.max_support_leak });
    write_record(ctx, &rep.record, extra)?;
    rate_check(ctx, &rep.record, cfg.convergence.rate_tolerance);
    ctx.check(Check::at_most("support leak of the cubic term", rep.max_support_leak, SUPPORT_LEAK_TOLERANCE));
    Ok(())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn mi_region(cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), RunError> {
    let lattice = cfg.lattice();
    let h = lattice.h();
    let m = cfg.m as f64;
    let r = &cfg.region;
    let xi = linspace(-m, m, r.xi_points);
    let amps = linspace(r.amplitude_min, r.amplitude_max, r.amplitude_points);
    let cases: Vec<(f64, f64)> = amps.iter().map(|&a| (cfg.alpha, a)).collect();
    let cells = instability_region(h, &xi, &cases);
    let focusing = ModelParams::new(cfg.alpha, -1)?;
    let mismatches = cells
        .iter()
        .filter(|c| c.unstable != (omega_sq(h, &focusing, c.amplitude, c.xi) < 0.0))
        .count();
    let rows: Vec<(f64, f64, u8)> = cells.iter().map(|c| (c.xi, c.amplitude, u8::from(c.unstable))).collect();
    ctx.table("region.csv", &["xi", "amplitude", "unstable"], &rows)?;
    let unstable = cells.iter().filter(|c| c.unstable).count();
    ctx.note("h", json!(h));
    ctx.note("cells", json!(cells.len()));
    ctx.note("unstable_cells", json!(unstable));
    ctx.note("focusing_only", json!(true));
    ctx.check(Check::at_most("mask vs sign of Omega^2", mismatches as f64, 0.0));
    Ok(())
}

fn mi_gain(cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), RunError> {
    let params = cfg.params();
    let rows = sweep_max_gain(&params, cfg.lattice(), &cfg.gain.amplitudes, cfg.cw.eps)?;
    let table: Vec<_> = rows
        .iter()
        .map(|r| {
            (
                r.amplitude,
                regime_name(r.regime),
                r.k_m,
                r.omega_theory,
                r.omega_prime,
                r.slope_measured,
                status_name(r.status),
            )
        })
        .collect();
    ctx.table(
        "gain.csv",
        &["amplitude", "regime", "k_m", "omega_theory", "omega_prime", "slope_measured", "status"],
        &table,
    )?;
    for r in &rows {
        let name = format!("A = {}", r.amplitude);
        if r.omega_theory > 0.0 {
            let dev = r.slope_measured.map_or(f64::INFINITY, |s| (s - r.omega_theory).abs() / r.omega_theory);
            ctx.check(Check::at_most(format!("{name}: relative slope error at k_m"), dev, cfg.gain.tolerance));
        } else {
            ctx.check(Check::flag(format!("{name}: no gain, no growth"), r.status == GrowthStatus::Stable));
        }
    }
    ctx.note("rows", serde_json::to_value(&rows).expect("serializable"));
    Ok(())
}

fn regime_name(r: fdnls_core::mi::GainRegime) -> &'static str {
    match r {
        fdnls_core::mi::GainRegime::LatticeSaturated => "lattice-saturated",
        fdnls_core::mi::GainRegime::Interior => "interior",
    }
}

fn status_name(s: GrowthStatus) -> &'static str {
    match s {
        GrowthStatus::Growing => "growing",
        GrowthStatus::Stable => "stable",
        GrowthStatus::UnderResolved => "under-resolved",
    }
}

fn mi_track(cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), RunError> {
    let params = cfg.params();
    let lattice = cfg.lattice();
    let solver = cfg.solver_config();
    let cw = cfg.cw_spec();
    let rep = measure_sideband_growth(&cw, lattice, &params, &solver, &cfg.track.modes)?;
    let mut long = Vec::with_capacity(rep.times.len() * rep.modes.len());
    for (i, &t) in rep.times.iter().enumerate() {
        for m in &rep.modes {
            long.push((t, m.k, m.amplitudes[i]));
        }
    }
    ctx.table("track.csv", &["t", "k", "amplitude"], &long)?;
    let growth: Vec<_> = rep
        .modes
        .iter()
        .map(|m| {
            (
                m.k,
                status_name(m.status),
                m.slope,
                m.predicted,
                m.window.map(|w| w.0),
                m.window.map(|w| w.1),
            )
        })
        .collect();
    ctx.table(
        "growth.csv",
        &["k", "status", "slope", "predicted", "window_start", "window_end"],
        &growth,
    )?;
    for m in &rep.modes {
        if m.predicted > 0.0 {
            let dev = m.relative_deviation().unwrap_or(f64::INFINITY);
            ctx.check(Check::at_most(format!("k = {}: relative slope error", m.k), dev, cfg.track.tolerance));
        } else if !params.is_focusing() {
            ctx.check(Check::flag(format!("k = {}: defocusing, no growth", m.k), m.status == GrowthStatus::Stable));
        }
    }
    if cfg.track.recurrence {
        let hist = sup_history(&cw, lattice, &params, &solver)?;
        let rows: Vec<_> = hist.times.iter().copied().zip(hist.sup_norms.iter().copied()).collect();
        ctx.table("sup.csv", &["t", "sup_norm"], &rows)?;
        let d = recurrence_diagnostic(&hist.times, &hist.sup_norms, cw.amplitude);
        ctx.note("recurrence", serde_json::to_value(&d).expect("serializable"));
    }
    Ok(())
}

fn kernel_probe(cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), RunError> {
    let params = cfg.params();
    let k = &cfg.kernel;
    let table = dispersive_bound_check(&params, &cfg.m_list, &TimeGrid::Geometric { points: k.t_points }, &k.n_list)?;
    let rows: Vec<_> = table
        .entries
        .iter()
        .map(|e| (e.m, e.n, e.t, u8::from(e.admissible), e.kernel_sup, e.ratio))
        .collect();
    ctx.table("bound.csv", &["M", "N", "t", "admissible", "kernel_sup", "ratio"], &rows)?;
    ctx.table("bound_sup.csv", &["M", "sup_ratio"], &table.sup_by_m)?;
    let variation = table.max_doubling_variation();
    ctx.note("max_doubling_variation", json!(variation));
    ctx.note("overall_sup", json!(table.overall_sup()));
    ctx.check(Check::at_most("sup ratio change under M-doubling", variation, k.max_variation));

    if !k.wavepacket_m_list.is_empty() {
        let rep = blowup_wavepacket_demo(&params, k.wavepacket_t, &k.wavepacket_m_list)?;
        let rows: Vec<_> = rep.rows.iter().map(|r| (r.m, r.h, u8::from(r.admitted), r.ratio)).collect();
        ctx.table("wavepacket.csv", &["M", "h", "admitted", "ratio"], &rows)?;
        ctx.note("wavepacket_fitted_slope", json!(rep.fitted_slope));
        ctx.note("wavepacket_expected_slope", json!(rep.expected_slope));
        ctx.check(Check::within(
            "wavepacket slope",
            rep.fitted_slope,
            rep.expected_slope,
            k.slope_tolerance,
        ));
    }

    if k.strichartz_samples > 0 {
        let seed = cfg.seed.unwrap_or(0);
        ctx.out.seeds.insert("strichartz".into(), json!(seed));
        let rep = strichartz_smoke(&params, &cfg.m_list, k.strichartz_samples, seed, k.strichartz_time_points)?;
        ctx.table("strichartz.csv", &["M", "max_ratio"], &rep.max_ratio_by_m)?;
        ctx.note("strichartz_constant", json!(rep.constant));
        ctx.check(Check::flag("one Strichartz constant covers every lattice", rep.passed));
    }
    Ok(())
}

fn oracle_check(cfg: &RunConfig, ctx: &mut Ctx) -> Result<(), RunError> {
    let params = cfg.params();
    let DatumSpec::PlaneWave(spec) = cfg.datum_or_default() else {
        unreachable!("validated as a plane wave");
    };
    let t = cfg.solver.t_end;
    let fine = Lattice::new(cfg.m_ref.unwrap_or(8 * cfg.m_list.last().copied().unwrap_or(1)))?;
    let u0 = spec.initial_datum(fine)?;
    let u_t = plane_wave_continuum(&spec, &params, fine, t)?;
    let dt = cfg.sweep_dt();
    let rows = cfg
        .m_list
        .par_iter()
        .map(|&m| -> fdnls_core::Result<_> {
            let l = Lattice::new(m)?;
            let solver = fdnls_core::dynamics::SolverConfig::new(dt.min(t), t, usize::MAX)?;
            let g = evolve_to_end(&discretize_dh(&u0, l)?, &params, &solver)?;
            let exact = plane_wave_discrete(&spec, &params, l, t)?;
            let lattice_dev = g.sub(&exact)?.sup_norm();
            let cont = l2_torus_error(&g, &u_t)?;
            let disc = lebesgue_norm_h(&g.sub(&discretize_dh(&u_t, l)?)?.into_physical(), 2.0)?;
            let h = l.h();
            Ok((m, h, lattice_dev, cont, cont / h, disc, disc / (h * h)))
        })
        .collect::<fdnls_core::Result<Vec<_>>>()?;
    ctx.table(
        "oracle.csv",
        &["M", "h", "lattice_deviation", "continuum_error", "continuum_ratio", "discrete_error", "discrete_ratio"],
        &rows,
    )?;
    let c = predicted_error_coefficients(&spec, &params, t);
    let finest = rows.last().expect("nonempty M_list");
    let worst_dev = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    ctx.note("predicted", serde_json::to_value(c).expect("serializable"));
    ctx.check(Check::at_most("lattice run vs closed-form lattice solution", worst_dev, 1e-9));
    ctx.check(Check::within(
        "continuum error / h at finest M",
        finest.4 / c.continuum,
        1.0,
        0.05,
    ));
    if c.discrete == 0.0 {
        let worst = rows.iter().map(|r| r.5).fold(0.0, f64::max);
        ctx.check(Check::at_most("discrete error (degenerate, identically zero)", worst, 1e-10));
    } else {
        ctx.check(Check::within("discrete error / h^2 at finest M", finest.6 / c.discrete, 1.0, 0.05));
    }
    Ok(())
}
