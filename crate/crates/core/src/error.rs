use thiserror::Error;

use crate::spectral::Representation;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("expected a field in {expected:?} representation, got {found:?}")]
    Representation {
        expected: Representation,
        found: Representation,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("mode {n} is aliased on a lattice with M = {m} (need |n| < M)")]
    Aliased { n: i64, m: usize },

    #[error("resolution error: frequency {k} is not representable below bandlimit {bandlimit}")]
    Resolution { k: i64, bandlimit: usize },

    #[error("blow-up detected at t = {time} (sup norm {sup_norm:e})")]
    BlowUp { time: f64, sup_norm: f64 },

    #[error("lattice run with M = {m} failed: {source}")]
    LatticeRun { m: usize, source: Box<Error> },

    #[error(
        "reference solution failed its self-convergence check: self-difference {self_difference:e} \
         exceeds {threshold:e}"
    )]
    ReferenceNotConverged {
        self_difference: f64,
        threshold: f64,
    },

    #[error("invalid solver configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
