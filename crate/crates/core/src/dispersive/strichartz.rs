use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::linear_propagate_discrete;
use crate::error::{domain, Result};
use crate::random::random_field;
use crate::spectral::{lebesgue_norm_h, sobolev_norm_h, Lattice, ModelParams};

/// Time exponent of the `(q, r) = (6, inf)` pair.
pub const STRICHARTZ_Q: f64 = 6.0;

/// Regularity `2/q + 0.01` on the right-hand side.
pub const STRICHARTZ_S: f64 = 2.0 / STRICHARTZ_Q + 0.01;

/// The constant is this multiple of the worst ratio on the smallest lattice.
pub const CALIBRATION_FACTOR: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrichartzReport {
    /// `(M, max ratio over samples)`, in the order given.
    pub max_ratio_by_m: Vec<(usize, f64)>,
    pub constant: f64,
    pub passed: bool,
}

/// `||U_h(.) f||_{L^6([0,1]; L^inf_h)}` by the midpoint rule on `time_points` cells.
pub fn space_time_norm(f: &crate::spectral::Field, params: &ModelParams, time_points: usize) -> Result<f64> {
    let dt = 1.0 / time_points as f64;
    let mut acc = 0.0;
    for i in 0..time_points {
        let t = (i as f64 + 0.5) * dt;
        let u = linear_propagate_discrete(f, t, params).into_physical();
        acc += dt * lebesgue_norm_h(&u, f64::INFINITY)?.powf(STRICHARTZ_Q);
    }
    Ok(acc.powf(1.0 / STRICHARTZ_Q))
}

/// Smoke test of the homogeneous Strichartz bound on seeded random data: one
/// constant, calibrated on the first lattice of `m_list`, must cover every lattice.
pub fn strichartz_smoke(
    params: &ModelParams,
    m_list: &[usize],
    samples: usize,
    seed: u64,
    time_points: usize,
) -> Result<StrichartzReport> {
    params.require_convergence_regime()?;
    if m_list.is_empty() || samples == 0 || time_points == 0 {
        return domain("need at least one lattice, one sample and one time point");
    }
    let max_ratio_by_m: Vec<(usize, f64)> = m_list
        .par_iter()
        .map(|&m| {
            let l = Lattice::new(m)?;
            let mut worst = 0.0f64;
            for i in 0..samples as u64 {
                let f = random_field(l, seed.wrapping_add(i));
                let r = space_time_norm(&f, params, time_points)? / sobolev_norm_h(&f, STRICHARTZ_S);
                worst = worst.max(r);
            }
            Ok((m, worst))
        })
        .collect::<Result<_>>()?;
    let constant = CALIBRATION_FACTOR * max_ratio_by_m[0].1;
    let passed = max_ratio_by_m.iter().all(|&(_, r)| r <= constant);
    Ok(StrichartzReport { max_ratio_by_m, constant, passed })
}
