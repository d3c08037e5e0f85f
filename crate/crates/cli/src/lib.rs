//! Config parsing, experiment orchestration and artifact writing behind the `fdnls` binary.

pub mod config;
pub mod manifest;
pub mod run;

pub use config::{parse_config, resolve, ConfigError, Experiment, Overrides, RunConfig};
pub use run::{run_experiment, Outcome, RunError};
