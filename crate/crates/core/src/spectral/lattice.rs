use std::f64::consts::PI;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Periodic lattice `T_h = { h j : j = -M, ..., M-1 }` with `h = pi / M`.
///
/// Only `M` is stored; the mesh size is always derived from it so that
/// `h * M = pi` holds by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Lattice {
    m: usize,
}

impl Lattice {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return domain("lattice half-size M must be positive");
        }
        Ok(Self { m })
    }

    /// Half the number of sites.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Mesh size `pi / M`.
    pub fn h(&self) -> f64 {
        PI / self.m as f64
    }

    /// Number of sites (equal to the number of dual frequencies).
    pub fn len(&self) -> usize {
        2 * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_power_of_two(&self) -> bool {
        self.m.is_power_of_two()
    }

    /// Site index range `-M..M`.
    pub fn indices(&self) -> Range<i64> {
        -(self.m as i64)..self.m as i64
    }

    /// Dual frequency range `-M..M` (the endpoint `-M` is included, `+M` is not).
    pub fn frequencies(&self) -> Range<i64> {
        self.indices()
    }

    pub fn site(&self, j: i64) -> f64 {
        self.h() * j as f64
    }

    pub fn sites(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.h();
        self.indices().map(move |j| h * j as f64)
    }

    pub fn contains_frequency(&self, k: i64) -> bool {
        self.frequencies().contains(&k)
    }

    /// Representative of `k` modulo `2M` in the dual range.
    pub fn wrap_frequency(&self, k: i64) -> i64 {
        let n = self.len() as i64;
        (k + self.m as i64).rem_euclid(n) - self.m as i64
    }

    /// Storage slot of frequency `k` (after wrapping) or of site index `j`.
    pub fn slot(&self, k: i64) -> usize {
        (self.wrap_frequency(k) + self.m as i64) as usize
    }

    /// Largest dyadic exponent `j` with `N_* = 2^j = 2^(ceil(log2(h/pi)) - 1)`.
    pub fn min_dyadic_exponent(&self) -> i32 {
        // ceil(log2(1/M)) = -floor(log2 M)
        -(self.m.ilog2() as i32) - 1
    }
}

impl TryFrom<usize> for Lattice {
    type Error = crate::Error;

    fn try_from(m: usize) -> Result<Self> {
        Self::new(m)
    }
}

impl From<Lattice> for usize {
    fn from(l: Lattice) -> usize {
        l.m
    }
}

/// Levy index `alpha` and nonlinearity sign `mu` of the model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    alpha: f64,
    mu: i8,
}

impl ModelParams {
    pub fn new(alpha: f64, mu: i8) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return domain(format!("alpha = {alpha} must lie in (0, 2]"));
        }
        if mu != 1 && mu != -1 {
            return domain(format!("mu = {mu} must be +1 (defocusing) or -1 (focusing)"));
        }
        Ok(Self { alpha, mu })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu(&self) -> f64 {
        f64::from(self.mu)
    }

    pub fn mu_sign(&self) -> i8 {
        self.mu
    }

    pub fn is_focusing(&self) -> bool {
        self.mu < 0
    }

    /// `alpha` in `(1, 2]`, where the continuum limit and the dispersive
    /// estimates are stated.
    pub fn in_convergence_regime(&self) -> bool {
        self.alpha > 1.0 && self.alpha <= 2.0
    }

    pub fn require_convergence_regime(&self) -> Result<()> {
        if self.in_convergence_regime() {
            Ok(())
        } else {
            domain(format!(
                "alpha = {} must lie in (1, 2] for continuum-limit and dispersive experiments",
                self.alpha
            ))
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.mu)
    }

    pub fn with_mu(&self, mu: i8) -> Result<Self> {
        Self::new(self.alpha, mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_size_is_derived() {
        for m in [1, 5, 16, 50, 1024] {
            let l = Lattice::new(m).unwrap();
            assert!((l.h() * m as f64 - PI).abs() < 1e-15);
            assert_eq!(l.len(), 2 * m);
            assert_eq!(l.sites().count(), l.frequencies().count());
        }
        assert!(Lattice::new(0).is_err());
    }

    #[test]
    fn wrapping_follows_one_sided_endpoint() {
        let l = Lattice::new(4).unwrap();
        assert_eq!(l.wrap_frequency(4), -4);
        assert_eq!(l.wrap_frequency(-4), -4);
        assert_eq!(l.wrap_frequency(3), 3);
        assert_eq!(l.wrap_frequency(11), 3);
        assert_eq!(l.wrap_frequency(-5), 3);
        assert_eq!(l.slot(-4), 0);
        assert_eq!(l.slot(3), 7);
        assert!(!l.contains_frequency(4));
        assert!(l.contains_frequency(-4));
    }

    #[test]
    fn min_dyadic_exponent() {
        // M = 8: h/pi = 1/8, ceil(log2) = -3, N_* = 2^-4
        assert_eq!(Lattice::new(8).unwrap().min_dyadic_exponent(), -4);
        // M = 5: log2(1/5) = -2.32, ceil = -2, N_* = 2^-3
        assert_eq!(Lattice::new(5).unwrap().min_dyadic_exponent(), -3);
        assert_eq!(Lattice::new(1).unwrap().min_dyadic_exponent(), -1);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(2.0, -1).is_ok());
        assert!(ModelParams::new(2.5, -1).is_err());
        assert!(ModelParams::new(0.0, 1).is_err());
        assert!(ModelParams::new(1.0, 0).is_err());
        let p = ModelParams::new(1.0, 1).unwrap();
        assert!(!p.in_convergence_regime());
        assert!(p.require_convergence_regime().is_err());
        assert!(ModelParams::new(1.5, 1).unwrap().in_convergence_regime());
    }
}
