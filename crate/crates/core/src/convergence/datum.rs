use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::oracles::{plane_wave_continuum, PlaneWaveSpec};
use crate::random::phase_for;
use crate::spectral::{bracket, Lattice, ModelParams};
use crate::transfer::ContinuumField;

/// Initial data for the continuum-limit experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatumSpec {
    /// `u0 = A`.
    Constant { amplitude: Complex64 },
    /// `u0 = A |n|^{-s} e^{inx}`.
    PlaneWave(PlaneWaveSpec),
    /// `u_hat(k) = 2 pi scale <k>^{-s - 1/2 - eps} e^{i theta_k}`, phases from `seed`.
    RandomSobolev { s: f64, eps: f64, seed: u64, scale: f64 },
    /// `u0 = sum_j c_j e^{i k_j x}`.
    Modes { modes: Vec<(i64, Complex64)> },
}

impl DatumSpec {
    /// The datum on a fine grid, truncated to its bandlimit.
    pub fn build(&self, fine: Lattice) -> Result<ContinuumField> {
        match self {
            DatumSpec::Constant { amplitude } => ContinuumField::from_modes(fine, &[(0, 2.0 * PI * amplitude)]),
            DatumSpec::PlaneWave(spec) => spec.initial_datum(fine),
            DatumSpec::RandomSobolev { s, eps, seed, scale } => {
                if !(*eps > 0.0) {
                    return domain("randomized Sobolev datum needs eps > 0");
                }
                let decay = s + 0.5 + eps;
                Ok(ContinuumField::from_coefficients(fine, |k| {
                    2.0 * PI * scale * bracket(k as f64).powf(-decay) * phase_for(*seed, k)
                }))
            }
            DatumSpec::Modes { modes } => {
                let scaled: Vec<_> = modes.iter().map(|&(k, c)| (k, 2.0 * PI * c)).collect();
                ContinuumField::from_modes(fine, &scaled)
            }
        }
    }

    /// Largest `|k|` in the datum, if its Fourier support is finite.
    pub fn max_mode(&self) -> Option<i64> {
        match self {
            DatumSpec::Constant { .. } => Some(0),
            DatumSpec::PlaneWave(spec) => Some(spec.n().abs()),
            DatumSpec::RandomSobolev { .. } => None,
            DatumSpec::Modes { modes } => modes.iter().map(|(k, _)| k.abs()).max(),
        }
    }

    /// Closed-form torus solution at time `t`, where one is known.
    pub fn exact_solution(&self, params: &ModelParams, fine: Lattice, t: f64) -> Option<Result<ContinuumField>> {
        match self {
            DatumSpec::Constant { amplitude } => {
                let c = amplitude * Complex64::from_polar(1.0, -params.mu() * amplitude.norm_sqr() * t);
                Some(ContinuumField::from_modes(fine, &[(0, 2.0 * PI * c)]))
            }
            DatumSpec::PlaneWave(spec) => Some(plane_wave_continuum(spec, params, fine, t)),
            _ => None,
        }
    }
}
