//! Run configuration: a JSON document, CLI overrides, eager validation.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use fdnls_core::convergence::DatumSpec;
use fdnls_core::dynamics::SolverConfig;
use fdnls_core::mi::CWSpec;
use fdnls_core::oracles::PlaneWaveSpec;
use fdnls_core::spectral::{DyadicScale, Lattice, ModelParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    Converge,
    Sharpness,
    CompactSupport,
    MiRegion,
    MiGain,
    MiTrack,
    KernelProbe,
    OracleCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Converge => "converge",
            Experiment::Sharpness => "sharpness",
            Experiment::CompactSupport => "compact-support",
            Experiment::MiRegion => "mi-region",
            Experiment::MiGain => "mi-gain",
            Experiment::MiTrack => "mi-track",
            Experiment::KernelProbe => "kernel-probe",
            Experiment::OracleCheck => "oracle-check",
        }
    }

    /// Continuum-limit and dispersive experiments need `alpha` in `(1, 2]`.
    fn needs_convergence_regime(self) -> bool {
        matches!(
            self,
            Experiment::Converge | Experiment::Sharpness | Experiment::CompactSupport | Experiment::KernelProbe
        )
    }

    fn uses_m_list(self) -> bool {
        matches!(
            self,
            Experiment::Converge
                | Experiment::Sharpness
                | Experiment::CompactSupport
                | Experiment::KernelProbe
                | Experiment::OracleCheck
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("could not read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("unknown config keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("config names experiment {file} but the command line asks for {cli}")]
    ExperimentMismatch { file: Experiment, cli: Experiment },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// `None` picks the engine default `0.1 min(1, 1/sigma_h(M))`.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub record_stride: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            dt: None,
            t_end: 1.0,
            record_stride: 10,
        }
    }
}

/// `A + eps e^{ikx}` for each listed `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CwSection {
    pub amplitude: f64,
    pub eps: f64,
    pub modes: Vec<i64>,
}

impl Default for CwSection {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            eps: 1e-6,
            modes: vec![1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceSection {
    /// `continuum` measures in `L^2(T)` after interpolation; `discrete` in `L^2_h` against `d_h u(t)`.
    pub norm: NormChoice,
    /// Record intervals for sup-in-time errors.
    pub records: usize,
    pub validate_reference: bool,
    /// Allowed `|fitted - expected|` for the manifest check.
    pub rate_tolerance: f64,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            norm: NormChoice::Continuum,
            records: 100,
            validate_reference: true,
            rate_tolerance: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormChoice {
    Continuum,
    Discrete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SharpnessSection {
    pub eps: f64,
}

impl Default for SharpnessSection {
    fn default() -> Self {
        Self { eps: 0.3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompactSupportSection {
    /// `(k, c)` with `c` written `[re, im]`.
    pub modes: Vec<(i64, Complex64)>,
}

impl Default for CompactSupportSection {
    fn default() -> Self {
        Self {
            modes: vec![(1, Complex64::new(1.0, 0.0)), (2, Complex64::new(0.5, 0.0))],
        }
    }
}

/// Uniform `(xi, A)` grid; `xi` spans the Brillouin zone `[-M, M]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionSection {
    pub xi_points: usize,
    pub amplitude_min: f64,
    pub amplitude_max: f64,
    pub amplitude_points: usize,
}

impl Default for RegionSection {
    fn default() -> Self {
        Self {
            xi_points: 200,
            amplitude_min: 0.05,
            amplitude_max: 3.0,
            amplitude_points: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainSection {
    pub amplitudes: Vec<f64>,
    pub tolerance: f64,
}

impl Default for GainSection {
    fn default() -> Self {
        Self {
            amplitudes: vec![0.25, 0.6, 0.8, 1.0, 1.5],
            tolerance: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackSection {
    /// Sidebands to follow; the perturbation itself comes from `cw.modes`.
    pub modes: Vec<i64>,
    pub tolerance: f64,
    /// Also write the sup-norm history and its recurrence diagnostic.
    pub recurrence: bool,
}

impl Default for TrackSection {
    fn default() -> Self {
        Self {
            modes: vec![1],
            tolerance: 0.05,
            recurrence: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    pub n_list: Vec<f64>,
    /// Geometric points per admissible window.
    pub t_points: usize,
    pub max_variation: f64,
    /// Wavepacket blow-up demo; skipped when `wavepacket_M_list` is empty.
    pub wavepacket_t: f64,
    #[serde(rename = "wavepacket_M_list")]
    pub wavepacket_m_list: Vec<usize>,
    pub slope_tolerance: f64,
    /// Strichartz smoke test on seeded random data; skipped when zero.
    pub strichartz_samples: usize,
    pub strichartz_time_points: usize,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            n_list: vec![1.0, 0.5, 0.25],
            t_points: 64,
            max_variation: 0.5,
            wavepacket_t: 1.0,
            wavepacket_m_list: Vec::new(),
            slope_tolerance: 0.15,
            strichartz_samples: 0,
            strichartz_time_points: 64,
        }
    }
}

/// Everything one run needs. Unset keys take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_mu")]
    pub mu: i8,
    /// Lattice for single-grid experiments.
    #[serde(rename = "M", default = "default_m")]
    pub m: usize,
    /// Reference grid; default `8 max(M_list)` (or `4 M` for `simulate`).
    #[serde(rename = "M_ref", default)]
    pub m_ref: Option<usize>,
    #[serde(rename = "M_list", default = "default_m_list")]
    pub m_list: Vec<usize>,
    /// Seed for randomized data; overrides the seed inside a `random-sobolev` datum.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverSection,
    /// Datum for `simulate`, `converge` and `oracle-check`.
    #[serde(default)]
    pub datum: Option<DatumSpec>,
    #[serde(default)]
    pub cw: CwSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
    #[serde(default)]
    pub sharpness: SharpnessSection,
    #[serde(default)]
    pub compact_support: CompactSupportSection,
    #[serde(default)]
    pub region: RegionSection,
    #[serde(default)]
    pub gain: GainSection,
    #[serde(default)]
    pub track: TrackSection,
    #[serde(default)]
    pub kernel: KernelSection,
}

fn default_alpha() -> f64 {
    2.0
}

fn default_mu() -> i8 {
    -1
}

fn default_m() -> usize {
    64
}

fn default_m_list() -> Vec<usize> {
    vec![16, 32, 64, 128]
}

/// Command-line values that win over the file.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub mu: Option<i8>,
    pub m: Option<usize>,
    pub m_ref: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut v = serde_json::Map::new();
        v.insert("experiment".into(), serde_json::to_value(experiment).expect("serializable"));
        serde_json::from_value(Value::Object(v)).expect("defaults deserialize")
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.alpha, self.mu).expect("validated")
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.m).expect("validated")
    }

    /// Output directory, `runs/<experiment>` unless set.
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(self.experiment.name()))
    }

    /// Datum with experiment-specific defaults and the run seed applied.
    pub fn datum_or_default(&self) -> DatumSpec {
        let mut d = self.datum.clone().unwrap_or_else(|| {
            DatumSpec::PlaneWave(PlaneWaveSpec::new(Complex64::new(1.0, 0.0), 1, 0.0).expect("valid plane wave"))
        });
        if let (Some(s), DatumSpec::RandomSobolev { seed, .. }) = (self.seed, &mut d) {
            *seed = s;
        }
        d
    }

    pub fn cw_spec(&self) -> CWSpec {
        CWSpec::with_modes(self.cw.amplitude, self.cw.eps, &self.cw.modes).expect("validated")
    }

    /// Solver for single-lattice runs.
    pub fn solver_config(&self) -> SolverConfig {
        self.try_solver_config().expect("validated")
    }

    fn try_solver_config(&self) -> Result<SolverConfig, String> {
        let s = &self.solver;
        let r = match s.dt {
            Some(dt) => SolverConfig::new(dt, s.t_end, s.record_stride),
            None => {
                let lattice = Lattice::new(self.m).map_err(|e| e.to_string())?;
                let params = ModelParams::new(self.alpha, self.mu).map_err(|e| e.to_string())?;
                SolverConfig::with_default_dt(lattice, &params, s.t_end, s.record_stride)
            }
        };
        r.map_err(|e| e.to_string())
    }

    /// Step for the sweep experiments, which share one `dt` between lattice and reference.
    pub fn sweep_dt(&self) -> f64 {
        self.solver.dt.unwrap_or(1e-3)
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.alpha {
            self.alpha = v;
        }
        if let Some(v) = o.mu {
            self.mu = v;
        }
        if let Some(v) = o.m {
            self.m = v;
        }
        if let Some(v) = o.m_ref {
            self.m_ref = Some(v);
        }
        if let Some(v) = o.dt {
            self.solver.dt = Some(v);
        }
        if let Some(v) = o.t_end {
            self.solver.t_end = v;
        }
        if let Some(v) = o.seed {
            self.seed = Some(v);
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
    }

    /// Range checks for everything the chosen experiment touches.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let e = self.experiment;
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return invalid(format!("α = {} must lie in (0,2]", self.alpha));
        }
        if e.needs_convergence_regime() && self.alpha <= 1.0 {
            return invalid(format!(
                "α = {} must lie in (1,2] for the continuum-limit and dispersive estimates ({e})",
                self.alpha
            ));
        }
        if self.mu != 1 && self.mu != -1 {
            return invalid(format!("μ = {} must be +1 (defocusing) or -1 (focusing)", self.mu));
        }
        if self.m == 0 {
            return invalid("M must be at least 1 (lattice of 2M sites, h = π/M)");
        }
        if e.uses_m_list() {
            if self.m_list.len() < 2 {
                return invalid("M_list needs at least two lattices for a rate fit");
            }
            if self.m_list.windows(2).any(|w| w[0] >= w[1]) || self.m_list[0] < 2 {
                return invalid("M_list must be strictly ascending with every M >= 2");
            }
            if let Some(r) = self.m_ref.filter(|_| e != Experiment::KernelProbe) {
                if let Some(m) = self.m_list.iter().find(|&&m| 8 * m > r || r % m != 0) {
                    return invalid(format!("M_ref = {r} must be a multiple of M = {m} and at least 8 M"));
                }
            }
        }
        if e == Experiment::Simulate {
            if let Some(r) = self.m_ref {
                if r < self.m || r % self.m != 0 {
                    return invalid(format!("M_ref = {r} must be a multiple of M = {}", self.m));
                }
            }
        }
        let s = &self.solver;
        if !(s.t_end.is_finite() && s.t_end > 0.0) {
            return invalid(format!("t_end = {} must be positive and finite", s.t_end));
        }
        if let Some(dt) = s.dt {
            if !(dt.is_finite() && dt > 0.0 && dt <= s.t_end) {
                return invalid(format!("dt = {dt} must lie in (0, t_end = {}]", s.t_end));
            }
        }
        self.try_solver_config().map_err(ConfigError::Invalid)?;

        match e {
            Experiment::Simulate | Experiment::MiTrack | Experiment::MiGain => self.validate_cw()?,
            _ => {}
        }
        match e {
            Experiment::Simulate | Experiment::Converge | Experiment::OracleCheck => self.validate_datum()?,
            Experiment::Sharpness => {
                if !(self.sharpness.eps > 0.0 && self.sharpness.eps.is_finite()) {
                    return invalid(format!("sharpness.eps = {} must be positive", self.sharpness.eps));
                }
                if self.convergence.records == 0 {
                    return invalid("convergence.records must be at least 1");
                }
            }
            Experiment::CompactSupport => {
                let k_max = self.compact_support.modes.iter().map(|m| m.0.abs()).max().unwrap_or(0);
                if k_max == 0 {
                    return invalid("compact_support.modes needs at least one nonzero mode");
                }
                if let Some(&m) = self.m_list.iter().find(|&&m| m <= 3 * k_max as usize) {
                    return invalid(format!(
                        "M = {m} must exceed 3 k_max = {} so the cubic term stays unaliased",
                        3 * k_max
                    ));
                }
            }
            Experiment::MiRegion => {
                let r = &self.region;
                if r.xi_points < 2 || r.amplitude_points < 2 {
                    return invalid("region grid needs at least 2 points per axis");
                }
                if !(r.amplitude_min > 0.0 && r.amplitude_min < r.amplitude_max && r.amplitude_max.is_finite()) {
                    return invalid("region amplitudes need 0 < amplitude_min < amplitude_max");
                }
            }
            Experiment::MiGain => {
                let a = &self.gain.amplitudes;
                if a.is_empty() || a[0] <= 0.0 || a.windows(2).any(|w| w[0] >= w[1]) {
                    return invalid("gain.amplitudes must be positive and strictly ascending");
                }
                if self.cw.eps <= 0.0 {
                    return invalid("mi-gain needs cw.eps > 0 to seed the sideband");
                }
            }
            Experiment::MiTrack => {
                if self.track.modes.is_empty() {
                    return invalid("track.modes must name at least one sideband");
                }
                let l = self.lattice();
                if let Some(k) = self.track.modes.iter().find(|&&k| !l.contains_frequency(k)) {
                    return invalid(format!("tracked mode {k} lies outside the dual range [-M, M) with M = {}", self.m));
                }
            }
            Experiment::KernelProbe => {
                let k = &self.kernel;
                if k.n_list.is_empty() {
                    return invalid("kernel.n_list must not be empty");
                }
                for &n in &k.n_list {
                    DyadicScale::from_value(n)
                        .map_err(|_| ConfigError::Invalid(format!("kernel.n_list entry {n} is not a dyadic scale 2^j <= 1")))?;
                }
                if k.t_points < 2 {
                    return invalid("kernel.t_points must be at least 2");
                }
                if !k.wavepacket_m_list.is_empty() && !(k.wavepacket_t > 0.0 && k.wavepacket_t.is_finite()) {
                    return invalid("kernel.wavepacket_t must be positive");
                }
                if k.strichartz_samples > 0 && k.strichartz_time_points == 0 {
                    return invalid("kernel.strichartz_time_points must be at least 1");
                }
            }
        }
        Ok(())
    }

    fn validate_cw(&self) -> Result<(), ConfigError> {
        let c = &self.cw;
        CWSpec::with_modes(c.amplitude, c.eps, &c.modes).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let l = self.lattice();
        if let Some(k) = c.modes.iter().find(|&&k| !l.contains_frequency(k)) {
            return invalid(format!("cw mode {k} lies outside the dual range [-M, M) with M = {}", self.m));
        }
        Ok(())
    }

    fn validate_datum(&self) -> Result<(), ConfigError> {
        let d = self.datum_or_default();
        if self.experiment == Experiment::OracleCheck && !matches!(d, DatumSpec::PlaneWave(_)) {
            return invalid("oracle-check needs a plane-wave datum");
        }
        if let Some(k) = d.max_mode() {
            let smallest = if self.experiment == Experiment::Simulate {
                self.m
            } else {
                self.m_list[0]
            };
            if k as usize >= smallest {
                return invalid(format!("datum mode {k} is aliased on the lattice M = {smallest} (need |k| < M)"));
            }
        }
        if let DatumSpec::PlaneWave(p) = &d {
            PlaneWaveSpec::new(p.amplitude(), p.n(), p.s()).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if let DatumSpec::RandomSobolev { eps, scale, .. } = d {
            if !(eps > 0.0) || !scale.is_finite() {
                return invalid("random-sobolev datum needs eps > 0 and a finite scale");
            }
        }
        Ok(())
    }
}

/// Keys of `doc` that the schema `reference` does not know, as dotted paths.
/// Only sections that are objects in `reference` are descended into.
fn unknown_keys(doc: &Value, reference: &Value, prefix: &str, out: &mut Vec<String>) {
    let (Value::Object(d), Value::Object(r)) = (doc, reference) else {
        return;
    };
    let known: BTreeSet<&String> = r.keys().collect();
    for (k, v) in d {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        if known.contains(k) {
            unknown_keys(v, &r[k], &path, out);
        } else {
            out.push(path);
        }
    }
}

/// Reads a JSON document into a config without validating it.
///
/// `experiment` fills in a missing `experiment` key and must agree with it when present.
pub fn parse_document(text: &str, experiment: Option<Experiment>) -> Result<RunConfig, ConfigError> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let Value::Object(map) = &mut doc else {
        return Err(ConfigError::Syntax("top level must be a JSON object".into()));
    };
    match (map.get("experiment"), experiment) {
        (Some(v), Some(cli)) => {
            let file: Experiment =
                serde_json::from_value(v.clone()).map_err(|e| ConfigError::Syntax(e.to_string()))?;
            if file != cli {
                return Err(ConfigError::ExperimentMismatch { file, cli });
            }
        }
        (None, Some(cli)) => {
            map.insert("experiment".into(), serde_json::to_value(cli).expect("serializable"));
        }
        (_, None) => {}
    }
    let reference = serde_json::to_value(RunConfig::defaults(Experiment::Simulate)).expect("serializable");
    let mut unknown = Vec::new();
    unknown_keys(&doc, &reference, "", &mut unknown);
    if !unknown.is_empty() {
        return Err(ConfigError::UnknownKeys(unknown));
    }
    serde_json::from_value(doc).map_err(|e| ConfigError::Syntax(e.to_string()))
}

/// Parses and validates a JSON config.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg = parse_document(text, None)?;
    cfg.validate()?;
    Ok(cfg)
}

/// File (if any), then flags, then validation.
pub fn resolve(experiment: Experiment, text: Option<&str>, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut cfg = match text {
        Some(t) => parse_document(t, Some(experiment))?,
        None => RunConfig::defaults(experiment),
    };
    cfg.apply(overrides);
    cfg.validate()?;
    Ok(cfg)
}
