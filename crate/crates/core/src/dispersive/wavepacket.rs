use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phase::critical_frequencies;
use crate::convergence::fit_power_law;
use crate::dynamics::linear_propagate_discrete;
use crate::error::{domain, Result};
use crate::spectral::{lebesgue_norm_h, Field, Lattice, ModelParams};

/// Trapezoid nodes for the bump and its transform.
pub const BUMP_NODES: usize = 4000;

/// Safety factor applied to the smallness condition on `h`.
pub const H_SAFETY: f64 = 0.1;

/// `psi_hat(eta) = c exp(-1 / (1 - eta^2))` on `(-1, 1)`, `c` chosen so the
/// trapezoid integral is 1.
#[derive(Clone, Debug)]
pub struct Bump {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    norm: f64,
}

fn raw_bump(eta: f64) -> f64 {
    if eta.abs() < 1.0 {
        (-1.0 / (1.0 - eta * eta)).exp()
    } else {
        0.0
    }
}

impl Bump {
    pub fn new(n: usize) -> Self {
        let w = 2.0 / n as f64;
        // interior nodes; the bump and all its derivatives vanish at +-1
        let nodes: Vec<f64> = (1..n).map(|i| -1.0 + i as f64 * w).collect();
        let total: f64 = nodes.iter().map(|&e| raw_bump(e)).sum::<f64>() * w;
        let weights = nodes.iter().map(|&e| raw_bump(e) / total * w).collect();
        Self { nodes, weights, norm: total }
    }

    pub fn value(&self, eta: f64) -> f64 {
        raw_bump(eta) / self.norm
    }

    /// `psi(y) = int psi_hat(eta) e^{i eta y} d eta`.
    pub fn transform(&self, y: f64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&e, &w)| w * Complex64::from_polar(1.0, e * y))
            .sum()
    }
}

impl Default for Bump {
    fn default() -> Self {
        Self::new(BUMP_NODES)
    }
}

/// Upper bound on `h` from the smallness hypothesis, before the safety factor:
/// `min(T^{-1/(3-alpha)}, T^{1/alpha} |alpha-1|^{3(2-alpha)/(2 alpha)}, |alpha-1|^{(2-alpha)/2})`.
pub fn h_bound(t: f64, alpha: f64) -> f64 {
    let d = (alpha - 1.0).abs();
    t.powf(-1.0 / (3.0 - alpha))
        .min(t.powf(1.0 / alpha) * d.powf(3.0 * (2.0 - alpha) / (2.0 * alpha)))
        .min(d.powf((2.0 - alpha) / 2.0))
}

/// `f_j = psi_tau(j) = (2 pi)^{-1} e^{i xi_c j} psi(tau^{-1/3} j)` on the sites
/// `j = -M..M`, i.e. the unit-lattice pullback of the wavepacket.
pub fn wavepacket(lattice: Lattice, alpha: f64, tau: f64, bump: &Bump) -> Result<Field> {
    let (_, xi_c) = critical_frequencies(1.0, alpha)?;
    let s = tau.powf(-1.0 / 3.0);
    let values = lattice
        .indices()
        .map(|j| {
            let j = j as f64;
            Complex64::from_polar(1.0, xi_c * j) * bump.transform(s * j) / (2.0 * PI)
        })
        .collect();
    Field::physical(lattice, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavepacketRow {
    pub m: usize,
    pub h: f64,
    pub admitted: bool,
    /// `||U_h(T) f||_inf / ||f||_{L^1_h}`; `None` when skipped.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavepacketReport {
    pub alpha: f64,
    pub t: f64,
    pub rows: Vec<WavepacketRow>,
    /// Log-log slope of the ratio in `h` over admitted rows.
    pub fitted_slope: f64,
    /// `-(1 - alpha/3)`.
    pub expected_slope: f64,
}

/// `L^1 -> L^inf` growth of `U_h(T)` on the wavepacket with `tau = T / h^alpha`.
pub fn blowup_wavepacket_demo(params: &ModelParams, t: f64, m_list: &[usize]) -> Result<WavepacketReport> {
    params.require_convergence_regime()?;
    if !(t > 0.0) {
        return domain(format!("T = {t} must be positive"));
    }
    let alpha = params.alpha();
    let limit = H_SAFETY * h_bound(t, alpha);
    let bump = Bump::default();
    let rows: Vec<WavepacketRow> = m_list
        .par_iter()
        .map(|&m| {
            let l = Lattice::new(m)?;
            let h = l.h();
            if h > limit {
                return Ok(WavepacketRow { m, h, admitted: false, ratio: None });
            }
            let f = wavepacket(l, alpha, t / h.powf(alpha), &bump)?;
            let u = linear_propagate_discrete(&f, t, params);
            let ratio = lebesgue_norm_h(&u, f64::INFINITY)? / lebesgue_norm_h(&f, 1.0)?;
            Ok(WavepacketRow { m, h, admitted: true, ratio: Some(ratio) })
        })
        .collect::<Result<_>>()?;
    let (hs, rs): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| r.ratio.map(|v| (r.h, v))).unzip();
    let fitted_slope = if hs.len() >= 3 { fit_power_law(&hs, &rs)?.rate } else { f64::NAN };
    Ok(WavepacketReport {
        alpha,
        t,
        rows,
        fitted_slope,
        expected_slope: -(1.0 - alpha / 3.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    #[test]
    fn bump_has_unit_mass() {
        let b = Bump::default();
        assert!((b.transform(0.0).re - 1.0).abs() < 1e-14);
        // independent rule: Gauss-Legendre on (-1, 1)
        let (x, w) = gauss_legendre(200);
        let gl: f64 = x.iter().zip(&w).map(|(&e, &w)| w * b.value(e)).sum();
        assert!((gl - 1.0).abs() < 1e-10, "{gl}");
        assert_eq!(b.value(1.0), 0.0);
    }

    #[test]
    fn admitted_mesh_sizes() {
        // alpha = 2: every term of the bound is 1 at T = 1
        assert!((h_bound(1.0, 2.0) - 1.0).abs() < 1e-15);
        let p = ModelParams::new(1.5, 1).unwrap();
        let r = blowup_wavepacket_demo(&p, 1.0, &[16, 32, 64]).unwrap();
        let admitted: Vec<bool> = r.rows.iter().map(|r| r.admitted).collect();
        // bound 0.5^{1/2} ~ 0.707, times 0.1
        assert_eq!(admitted, vec![false, false, true]);
        assert!(r.fitted_slope.is_nan());
    }

    #[test]
    fn longer_time_lowers_the_ratio() {
        let p = ModelParams::new(2.0, 1).unwrap();
        let a = blowup_wavepacket_demo(&p, 0.5, &[128]).unwrap().rows[0].ratio.unwrap();
        let b = blowup_wavepacket_demo(&p, 1.0, &[128]).unwrap().rows[0].ratio.unwrap();
        // T^{-1/3} trend: doubling T should cut the ratio by about 2^{1/3}
        assert!(a > b);
        assert!(((a / b) / 2f64.powf(1.0 / 3.0) - 1.0).abs() < 0.1, "{}", a / b);
    }
}
