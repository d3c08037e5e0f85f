use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::{sigma_at, Lattice, ModelParams};

/// Which branch of the maximum-gain formula applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainRegime {
    /// `(2/h)^alpha <= A^2`: the gain peaks at the edge of the band, `|k| = M`.
    LatticeSaturated,
    /// The peak sits at `xi_m` inside the band.
    Interior,
}

/// `Omega^2(xi) = sigma_h(xi) (sigma_h(xi) + 2 mu A^2)` for a CW background of amplitude `A`.
pub fn omega_sq(h: f64, params: &ModelParams, amplitude: f64, xi: f64) -> f64 {
    let s = sigma_at(h, params.alpha(), xi);
    s * (s + 2.0 * params.mu() * amplitude * amplitude)
}

/// `sqrt(-Omega^2)` where it is real and positive, else 0.
pub fn gain(h: f64, params: &ModelParams, amplitude: f64, xi: f64) -> f64 {
    let w = omega_sq(h, params, amplitude, xi);
    if w < 0.0 {
        (-w).sqrt()
    } else {
        0.0
    }
}

/// Whether `xi` lies in the focusing instability region `0 < sigma_h(xi) < 2 A^2`,
/// `|xi| <= pi / h`. Independent of `mu`; for `mu = +1` nothing is unstable.
pub fn in_instability_region(h: f64, alpha: f64, amplitude: f64, xi: f64) -> bool {
    // |xi| <= pi / h, tolerant of the rounding in h = pi / M
    if xi.abs() * h > std::f64::consts::PI * (1.0 + 1e-12) {
        return false;
    }
    let s = sigma_at(h, alpha, xi);
    s > 0.0 && s < 2.0 * amplitude * amplitude
}

/// `(2/h) arcsin(h A^{2/alpha} / 2)`, the real maximizer of `-Omega^2`; `None`
/// when the arcsin argument leaves `[0, 1)` (saturated lattice).
pub fn xi_m(h: f64, alpha: f64, amplitude: f64) -> Option<f64> {
    let arg = 0.5 * h * amplitude.powf(2.0 / alpha);
    (arg < 1.0).then(|| 2.0 / h * arg.asin())
}

/// Linear stability analysis of the CW solution `A e^{-i mu A^2 t}` on one lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MIReport {
    pub m: usize,
    pub alpha: f64,
    pub mu: i8,
    pub amplitude: f64,
    /// `Omega^2(k)`, `k = -M..M`.
    pub omega_sq: Vec<f64>,
    /// `{k : Omega^2(k) < 0}`, ascending; never contains 0.
    pub unstable_set: Vec<i64>,
    /// `sqrt(-Omega^2)` on the unstable set, 0 elsewhere (dual order).
    pub gain: Vec<f64>,
    pub omega_max: f64,
    /// Maximum over real `xi`: `sqrt(-Omega^2(xi_m)) = A^2` in the interior
    /// regime, `omega_max` when saturated. Bounds `omega_max` from above.
    pub omega_prime: f64,
    /// `|k_m| >= 0`; the gain is even, so `-k_max` attains it too.
    pub k_max: i64,
    pub xi_m: Option<f64>,
    pub regime: GainRegime,
}

impl MIReport {
    pub fn gain_at(&self, k: i64) -> f64 {
        let l = Lattice::new(self.m).expect("report lattice");
        self.gain[l.slot(k)]
    }

    pub fn is_unstable(&self, k: i64) -> bool {
        self.unstable_set.binary_search(&k).is_ok()
    }
}

pub fn mi_dispersion(lattice: Lattice, params: &ModelParams, amplitude: f64) -> Result<MIReport> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return domain(format!("CW amplitude A = {amplitude} must be positive"));
    }
    let h = lattice.h();
    let alpha = params.alpha();
    let omega_sq: Vec<f64> = lattice
        .frequencies()
        .map(|k| omega_sq(h, params, amplitude, k as f64))
        .collect();
    let unstable_set: Vec<i64> = lattice
        .frequencies()
        .zip(&omega_sq)
        .filter(|&(k, &w)| k != 0 && w < 0.0)
        .map(|(k, _)| k)
        .collect();
    let gains: Vec<f64> = omega_sq
        .iter()
        .map(|&w| if w < 0.0 { (-w).sqrt() } else { 0.0 })
        .collect();

    let edge = (2.0 / h).powf(alpha);
    let a2 = amplitude * amplitude;
    let m = lattice.m() as i64;
    let (regime, xi) = if edge <= a2 {
        (GainRegime::LatticeSaturated, None)
    } else {
        (GainRegime::Interior, xi_m(h, alpha, amplitude))
    };
    let (k_max, omega_max) = if !params.is_focusing() {
        (0, 0.0)
    } else {
        match regime {
            GainRegime::LatticeSaturated => (m, ((2.0 * a2 - edge) * edge).max(0.0).sqrt()),
            GainRegime::Interior => {
                let xi = xi.expect("interior regime has xi_m");
                // ties go to the smaller |k|
                let lo = (xi.floor() as i64).min(m);
                let hi = (xi.ceil() as i64).min(m);
                let (g_lo, g_hi) = (gain(h, params, amplitude, lo as f64), gain(h, params, amplitude, hi as f64));
                if g_hi > g_lo {
                    (hi, g_hi)
                } else {
                    (lo, g_lo)
                }
            }
        }
    };
    let omega_prime = match (params.is_focusing(), xi) {
        (false, _) => 0.0,
        (true, Some(x)) => gain(h, params, amplitude, x),
        (true, None) => omega_max,
    };
    Ok(MIReport {
        m: lattice.m(),
        alpha,
        mu: params.mu_sign(),
        amplitude,
        omega_sq,
        unstable_set,
        gain: gains,
        omega_max,
        omega_prime,
        k_max,
        xi_m: xi,
        regime,
    })
}

/// One cell of an instability-region grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub xi: f64,
    pub alpha: f64,
    pub amplitude: f64,
    pub unstable: bool,
}

/// Instability mask over `xi_grid x cases`, each case an `(alpha, A)` pair.
/// Row-major in `cases`, then `xi`.
pub fn instability_region(h: f64, xi_grid: &[f64], cases: &[(f64, f64)]) -> Vec<RegionCell> {
    cases
        .iter()
        .flat_map(|&(alpha, amplitude)| {
            xi_grid.iter().map(move |&xi| RegionCell {
                xi,
                alpha,
                amplitude,
                unstable: in_instability_region(h, alpha, amplitude, xi),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn focusing(alpha: f64) -> ModelParams {
        ModelParams::new(alpha, -1).unwrap()
    }

    #[test]
    fn defocusing_is_stable() {
        for (alpha, a, m) in [(2.0, 4.0, 5usize), (0.5, 0.1, 50), (1.3, 20.0, 16)] {
            let r = mi_dispersion(Lattice::new(m).unwrap(), &ModelParams::new(alpha, 1).unwrap(), a).unwrap();
            assert!(r.unstable_set.is_empty());
            assert!(r.gain.iter().all(|&g| g == 0.0));
            assert_eq!(r.omega_max, 0.0);
        }
    }

    #[test]
    fn region_at_critical_amplitude_is_alpha_free() {
        let l = Lattice::new(5).unwrap();
        let a = 0.5f64.sqrt();
        let sets: Vec<_> = [0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|&alpha| mi_dispersion(l, &focusing(alpha), a).unwrap().unstable_set)
            .collect();
        assert!(sets.windows(2).all(|w| w[0] == w[1]));
        assert!(!sets[0].is_empty());
    }

    #[test]
    fn saturated_lattice_example() {
        let l = Lattice::new(5).unwrap();
        let r = mi_dispersion(l, &focusing(2.0), 4.0).unwrap();
        assert_eq!(r.regime, GainRegime::LatticeSaturated);
        assert_eq!(r.k_max, 5);
        let c = (10.0 / PI).powi(2);
        assert!((r.omega_max - ((32.0 - c) * c).sqrt()).abs() < 1e-12);
        assert!((r.omega_max - 14.885).abs() < 1e-3, "{}", r.omega_max);
        assert!((r.gain_at(-5) - r.omega_max).abs() < 1e-12);
    }

    #[test]
    fn interior_example() {
        let l = Lattice::new(50).unwrap();
        let r = mi_dispersion(l, &focusing(2.0), 1.0).unwrap();
        assert_eq!(r.regime, GainRegime::Interior);
        assert!((r.xi_m.unwrap() - 1.0002).abs() < 1e-4, "{:?}", r.xi_m);
        assert_eq!(r.k_max, 1);
        assert!((r.gain_at(1) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn branches_agree_at_the_crossover() {
        let l = Lattice::new(20).unwrap();
        let h = l.h();
        let alpha = 1.5;
        let a = (2.0 / h).powf(alpha / 2.0);
        // at the boundary xi_m = pi/h and both formulas give A^2
        let saturated = ((2.0 * a * a - (2.0 / h).powf(alpha)) * (2.0 / h).powf(alpha)).sqrt();
        let interior = gain(h, &focusing(alpha), a, PI / h);
        assert!((saturated - a * a).abs() < 1e-9 * a * a);
        assert!((interior - a * a).abs() < 1e-9 * a * a);
        let r = mi_dispersion(l, &focusing(alpha), a).unwrap();
        assert!((r.omega_max - a * a).abs() < 1e-9 * a * a);
    }

    #[test]
    fn small_and_large_amplitude_asymptotics() {
        let l = Lattice::new(50).unwrap();
        for a in [0.2, 0.5, 0.8, 1.0] {
            let r = mi_dispersion(l, &focusing(2.0), a).unwrap();
            // the real maximum is exactly A^2; the integer one can trail it far
            assert!((r.omega_prime / (a * a) - 1.0).abs() < 1e-12);
            assert!(r.omega_max <= r.omega_prime + 1e-12);
        }
        assert_eq!(mi_dispersion(l, &focusing(2.0), 0.6).unwrap().omega_max, 0.0);
        let h = l.h();
        let edge: f64 = (2.0 / h).powi(2);
        let mut prev = 0.0;
        for a in [2.0 * edge.sqrt(), 4.0 * edge.sqrt(), 16.0 * edge.sqrt()] {
            let r = mi_dispersion(l, &focusing(2.0), a).unwrap();
            let ratio = r.omega_max / (2f64.sqrt() * a * edge.sqrt());
            assert!(ratio < 1.0 && ratio > prev);
            prev = ratio;
        }
        assert!(prev > 0.99);
    }

    #[test]
    fn continuum_set_is_contained() {
        for m in [16usize, 64, 256] {
            let l = Lattice::new(m).unwrap();
            let a = 1.7;
            let r = mi_dispersion(l, &focusing(1.5), a).unwrap();
            let continuum: Vec<i64> = l
                .frequencies()
                .filter(|&k| k != 0 && (k.abs() as f64).powf(1.5) < 2.0 * a * a)
                .collect();
            assert!(continuum.iter().all(|k| r.is_unstable(*k)));
            if m >= 64 {
                assert_eq!(continuum, r.unstable_set);
            }
        }
    }

    #[test]
    fn mask_matches_unstable_set_on_integers() {
        let l = Lattice::new(10).unwrap();
        let r = mi_dispersion(l, &focusing(1.2), 1.3).unwrap();
        let xi: Vec<f64> = l.frequencies().map(|k| k as f64).collect();
        let cells = instability_region(l.h(), &xi, &[(1.2, 1.3)]);
        for (k, c) in l.frequencies().zip(&cells) {
            assert_eq!(c.unstable, r.is_unstable(k), "k = {k}");
        }
    }

    proptest! {
        #[test]
        fn report_invariants(m in 2usize..80, alpha in 0.05f64..=2.0, a in 0.01f64..30.0, mu in prop::sample::select(vec![-1i8, 1])) {
            let l = Lattice::new(m).unwrap();
            let p = ModelParams::new(alpha, mu).unwrap();
            let r = mi_dispersion(l, &p, a).unwrap();
            for (i, k) in l.frequencies().enumerate() {
                let w = r.omega_sq[i];
                prop_assert_eq!(w, omega_sq(l.h(), &p, a, -(k as f64)));
                prop_assert_eq!(r.gain[i] > 0.0, r.is_unstable(k));
                if r.gain[i] > 0.0 {
                    let s = sigma_at(l.h(), alpha, k as f64);
                    prop_assert!(mu == -1 && s > 0.0 && s < 2.0 * a * a);
                }
            }
            let max = r.gain.iter().cloned().fold(0.0, f64::max);
            prop_assert!((r.omega_max - max).abs() <= 1e-9 * max.max(1.0));
            prop_assert!((r.gain_at(r.k_max) - r.omega_max).abs() <= 1e-9 * max.max(1.0));
            prop_assert!(r.omega_max <= r.omega_prime * (1.0 + 1e-12) + 1e-12);
        }
    }
}
