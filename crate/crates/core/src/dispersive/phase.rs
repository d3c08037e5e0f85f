use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::sigma_at;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        domain(format!("alpha = {alpha} must lie in (1, 2] (arccos(alpha^(-1/2)) needs alpha > 1)"))
    }
}

/// `phi(xi) = -t |2/h sin(h xi / 2)|^alpha + xi x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub h: f64,
    pub t: f64,
    pub x: f64,
    pub alpha: f64,
}

impl PhaseSpec {
    pub fn new(h: f64, t: f64, x: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(h > 0.0) {
            return domain(format!("mesh size h = {h} must be positive"));
        }
        Ok(Self { h, t, x, alpha })
    }

    pub fn phi(&self, xi: f64) -> f64 {
        -self.t * sigma_at(self.h, self.alpha, xi) + xi * self.x
    }

    /// Closed form of `phi''` for `xi != 0`.
    pub fn phi_second(&self, xi: f64) -> f64 {
        let (h, a) = (self.h, self.alpha);
        let c = (0.5 * h * xi).cos();
        let s = (0.5 * h * xi).sin().abs();
        a * self.t * (0.5 * h).powf(2.0 - a) * (1.0 - a * c * c) / s.powf(2.0 - a)
    }
}

/// `(xi_0, xi_c)`: the positive inflection point `(2/h) arccos(alpha^{-1/2})`
/// of the phase, and the same at `h = 1`.
pub fn critical_frequencies(h: f64, alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let c = alpha.powf(-0.5).acos();
    Ok((2.0 / h * c, 2.0 * c))
}

/// Largest `|t|` covered by the short-time dispersive estimate:
/// `pi^{2-alpha} / (2 alpha) * (h/N)^{alpha-1}`.
pub fn admissible_time(h: f64, alpha: f64, n: f64) -> f64 {
    PI.powf(2.0 - alpha) / (2.0 * alpha) * (h / n).powf(alpha - 1.0)
}

/// `|alpha-1|^{-1/3} (N/h)^{1-alpha/3} |t|^{-1/3}`.
pub fn dispersive_rhs(h: f64, alpha: f64, n: f64, t: f64) -> f64 {
    (alpha - 1.0).abs().powf(-1.0 / 3.0) * (n / h).powf(1.0 - alpha / 3.0) * t.abs().powf(-1.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_inflection_is_quarter_turn() {
        let (xi0, xic) = critical_frequencies(1.0, 2.0).unwrap();
        assert!((xic - PI / 2.0).abs() < 1e-15);
        assert_eq!(xi0, xic);
        let (xi0, _) = critical_frequencies(PI / 10.0, 1.0 + 1e-12).unwrap();
        assert!(xi0 < 1e-4);
        assert!(critical_frequencies(1.0, 1.0).is_err());
        assert!(critical_frequencies(1.0, 0.5).is_err());
    }

    #[test]
    fn second_derivative_vanishes_at_xi0() {
        for (m, alpha, t) in [(16usize, 1.5, 0.3), (64, 1.25, 0.01), (50, 2.0, 1.0)] {
            let h = PI / m as f64;
            let (xi0, _) = critical_frequencies(h, alpha).unwrap();
            let p = PhaseSpec::new(h, t, 0.7, alpha).unwrap();
            let d = 1e-3 / h;
            let fd = (p.phi(xi0 + d) - 2.0 * p.phi(xi0) + p.phi(xi0 - d)) / (d * d);
            let scale = t * (2.0 / h).powf(alpha);
            assert!(fd.abs() <= 1e-6 * scale, "{fd} vs {scale}");
            assert!(p.phi_second(xi0).abs() <= 1e-12 * scale);
            // closed form against finite differences away from the root
            let xi = 0.4 * xi0;
            let fd = (p.phi(xi + d) - 2.0 * p.phi(xi) + p.phi(xi - d)) / (d * d);
            assert!((fd - p.phi_second(xi)).abs() <= 1e-5 * p.phi_second(xi).abs());
        }
    }
}
