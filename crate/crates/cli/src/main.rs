use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use fdnls_cli::config::{resolve, ConfigError, Experiment, Overrides, RunConfig};
use fdnls_cli::manifest::{ErrorRecord, Manifest, Stage, Status, Versions};
use fdnls_cli::run::run_experiment;
use serde_json::Value;

/// Fractional discrete NLS laboratory: runs one experiment and writes CSV/NDJSON
/// tables plus `manifest.json` into the output directory.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on error.
#[derive(Parser, Debug)]
#[command(name = "fdnls", version)]
struct Cli {
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON config; command-line flags win over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    /// +1 defocusing, -1 focusing.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<i8>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long = "M-ref")]
    m_ref: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default `runs/<experiment>`).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Worker count from `FDNLS_THREADS`, if set.
fn configure_threads() -> Result<usize, ConfigError> {
    if let Ok(v) = std::env::var("FDNLS_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| ConfigError::Invalid(format!("FDNLS_THREADS = {v:?} must be a positive integer")))?;
        // A pool may already exist when running under a harness; keep it then.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}

fn load(cli: &Cli) -> Result<(RunConfig, usize), (ConfigError, Value)> {
    let threads = configure_threads().map_err(|e| (e, Value::Null))?;
    let text = match &cli.config {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|source| {
            (
                ConfigError::Read {
                    path: p.clone(),
                    source,
                },
                Value::Null,
            )
        })?),
        None => None,
    };
    let overrides = Overrides {
        alpha: cli.alpha,
        mu: cli.mu,
        m: cli.m,
        m_ref: cli.m_ref,
        dt: cli.dt,
        t_end: cli.t_end,
        seed: cli.seed,
        out: cli.out.clone(),
    };
    let raw = serde_json::json!({
        "document": text.as_deref().and_then(|t| serde_json::from_str::<Value>(t).ok()),
        "overrides": overrides,
    });
    let cfg = resolve(cli.experiment, text.as_deref(), &overrides).map_err(|e| (e, raw))?;
    Ok((cfg, threads))
}

fn config_error_kind(e: &ConfigError) -> &'static str {
    match e {
        ConfigError::Read { .. } => "config-read",
        ConfigError::Syntax(_) => "config-syntax",
        ConfigError::UnknownKeys(_) => "config-unknown-keys",
        ConfigError::ExperimentMismatch { .. } => "config-experiment-mismatch",
        ConfigError::Invalid(_) => "config-invalid",
    }
}

fn finish(manifest: &Manifest, dir: &std::path::Path) -> ExitCode {
    if let Err(e) = manifest.write(dir) {
        eprintln!("error: could not write manifest into {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    for c in &manifest.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let measured = c.measured.map_or(String::new(), |m| format!(" measured {m:.6e}"));
        println!("{verdict} {}{measured}", c.name);
    }
    if let Some(e) = &manifest.error {
        eprintln!("error ({}): {}", e.kind, e.message);
    }
    println!("manifest: {}", dir.join("manifest.json").display());
    match manifest.status {
        Status::Passed => ExitCode::SUCCESS,
        Status::Failed => ExitCode::from(1),
        Status::Error => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();
    let empty = Value::Object(Default::default());

    let (cfg, threads) = match load(&cli) {
        Ok(v) => v,
        Err((e, raw)) => {
            let dir = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("runs").join(cli.experiment.name()));
            let manifest = Manifest {
                experiment: cli.experiment.name().into(),
                status: Status::Error,
                stage: Some(Stage::Config),
                error: Some(ErrorRecord {
                    kind: config_error_kind(&e).into(),
                    message: e.to_string(),
                }),
                config: raw,
                versions: Versions::default(),
                seeds: empty.clone(),
                threads: rayon::current_num_threads(),
                wall_time_s: start.elapsed().as_secs_f64(),
                checks: Vec::new(),
                summary: empty,
                artifacts: Vec::new(),
            };
            return finish(&manifest, &dir);
        }
    };

    let dir = cfg.out_dir();
    let mut manifest = Manifest {
        experiment: cfg.experiment.name().into(),
        status: Status::Error,
        stage: None,
        error: None,
        config: serde_json::to_value(&cfg).expect("config serializes"),
        versions: Versions::default(),
        seeds: empty.clone(),
        threads,
        wall_time_s: 0.0,
        checks: Vec::new(),
        summary: empty,
        artifacts: Vec::new(),
    };
    if let Err(e) = std::fs::create_dir_all(&dir) {
        manifest.stage = Some(Stage::Setup);
        manifest.error = Some(ErrorRecord {
            kind: "io".into(),
            message: format!("could not create {}: {e}", dir.display()),
        });
        manifest.wall_time_s = start.elapsed().as_secs_f64();
        return finish(&manifest, &dir);
    }

    let outcome = run_experiment(&cfg, &dir);
    manifest.checks = outcome.checks;
    manifest.summary = Value::Object(outcome.summary);
    manifest.seeds = Value::Object(outcome.seeds);
    manifest.artifacts = outcome.artifacts;
    match &outcome.error {
        Some(e) => {
            manifest.stage = Some(e.stage());
            manifest.error = Some(e.record());
        }
        None => {
            manifest.status = if manifest.checks.iter().all(|c| c.passed) {
                Status::Passed
            } else {
                Status::Failed
            };
        }
    }
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    finish(&manifest, &dir)
}
