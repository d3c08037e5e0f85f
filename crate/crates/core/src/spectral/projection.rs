//! Littlewood-Paley projections on the dual lattice.
//!
//! For `2 N_* <= N <= 1` the projector keeps `|k|` in the half-open shell
//! `(M N / 2, M N]` (since `pi N / h = M N`); the `N_*` piece is the identity
//! minus all the others, which on any lattice is the zero mode alone.

use num_complex::Complex64;

use super::{Field, Lattice};
use crate::error::{domain, Result};

/// A dyadic scale `N = 2^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicScale {
    exponent: i32,
}

impl DyadicScale {
    pub fn new(exponent: i32) -> Self {
        Self { exponent }
    }

    /// Parses a real `N`, which must be an exact power of two.
    pub fn from_value(n: f64) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return domain(format!("dyadic scale N = {n} must be positive"));
        }
        let e = n.log2().round() as i32;
        if 2f64.powi(e) != n {
            return domain(format!("N = {n} is not a power of two"));
        }
        Ok(Self { exponent: e })
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn value(&self) -> f64 {
        2f64.powi(self.exponent)
    }

    /// All admissible scales `N_*, 2 N_*, ..., 1` of `lattice`, ascending.
    pub fn all(lattice: Lattice) -> Vec<DyadicScale> {
        (lattice.min_dyadic_exponent()..=0).map(Self::new).collect()
    }

    pub(crate) fn check(&self, lattice: Lattice) -> Result<()> {
        let lo = lattice.min_dyadic_exponent();
        if self.exponent < lo || self.exponent > 0 {
            return domain(format!(
                "N = 2^{} outside the dyadic range [2^{lo}, 1] for M = {}",
                self.exponent,
                lattice.m()
            ));
        }
        Ok(())
    }

    /// Upper edge `M N` of the shell in units of `k`.
    pub fn cutoff(&self, lattice: Lattice) -> f64 {
        lattice.m() as f64 * self.value()
    }

    /// Whether `k` belongs to the shell of this scale.
    pub fn contains(&self, lattice: Lattice, k: i64) -> bool {
        let a = (k as f64).abs();
        if self.exponent == lattice.min_dyadic_exponent() {
            // remainder piece; (M N_*) < 1 so only k = 0 is left
            a <= self.cutoff(lattice)
        } else {
            a > 0.5 * self.cutoff(lattice) && a <= self.cutoff(lattice)
        }
    }
}

/// `P_N f`, in the representation of `f`.
pub fn littlewood_paley_project(f: &Field, scale: DyadicScale) -> Result<Field> {
    let l = f.lattice();
    scale.check(l)?;
    Ok(f.apply_multiplier(|k| indicator(scale.contains(l, k))))
}

/// `P_{<=N} f = sum_{N' <= N} P_{N'} f`, i.e. the frequency cut `|k| <= M N`.
pub fn project_low(f: &Field, scale: DyadicScale) -> Result<Field> {
    let l = f.lattice();
    scale.check(l)?;
    let cut = scale.cutoff(l);
    Ok(f.apply_multiplier(|k| indicator((k as f64).abs() <= cut)))
}

fn indicator(b: bool) -> Complex64 {
    Complex64::new(if b { 1.0 } else { 0.0 }, 0.0)
}
