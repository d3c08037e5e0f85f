//! The per-run JSON record, written whether or not the run succeeds.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Config,
    Setup,
    Run,
    Write,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Finished and every check passed.
    Passed,
    /// Finished, at least one check failed.
    Failed,
    /// Stopped early; see `stage` and `error`.
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

/// A measured quantity compared against its expected value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
}

impl Check {
    /// `|measured - expected| <= tolerance`.
    pub fn within(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured: Some(measured),
            expected: Some(expected),
            tolerance: Some(tolerance),
            passed: (measured - expected).abs() <= tolerance,
        }
    }

    /// `measured <= bound`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured: Some(measured),
            expected: None,
            tolerance: Some(bound),
            passed: measured <= bound,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            measured: None,
            expected: None,
            tolerance: None,
            passed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub fdnls: &'static str,
    pub manifest_format: u32,
}

impl Default for Versions {
    fn default() -> Self {
        Self {
            fdnls: env!("CARGO_PKG_VERSION"),
            manifest_format: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub status: Status,
    pub stage: Option<Stage>,
    pub error: Option<ErrorRecord>,
    /// Fully resolved config, or the raw document if it failed to parse.
    pub config: Value,
    pub versions: Versions,
    /// Every seed that fed a randomized datum, by role.
    pub seeds: Value,
    pub threads: usize,
    pub wall_time_s: f64,
    pub checks: Vec<Check>,
    pub summary: Value,
    pub artifacts: Vec<String>,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), text + "\n")
    }
}
