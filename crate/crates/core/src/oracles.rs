//! Closed-form solutions and leading error coefficients used as ground truth.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::spectral::{symbol_sigma_h, Field, Lattice, ModelParams};
use crate::transfer::{cell_average_factor, ContinuumField};

/// Plane-wave datum `u0(x) = A |n|^{-s} e^{inx}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveSpec {
    amplitude: Complex64,
    n: i64,
    s: f64,
}

impl PlaneWaveSpec {
    pub fn new(amplitude: Complex64, n: i64, s: f64) -> Result<Self> {
        if n == 0 {
            return domain("plane-wave mode n must be nonzero");
        }
        if amplitude.norm() == 0.0 || !amplitude.norm().is_finite() {
            return domain("plane-wave amplitude must be nonzero and finite");
        }
        if !s.is_finite() {
            return domain("regularity weight s must be finite");
        }
        Ok(Self { amplitude, n, s })
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `A |n|^{-s}`.
    pub fn physical_amplitude(&self) -> Complex64 {
        self.amplitude * (self.n.unsigned_abs() as f64).powf(-self.s)
    }

    /// `|n|^alpha + mu |A|^2 |n|^{-2s}`.
    pub fn continuum_frequency(&self, params: &ModelParams) -> f64 {
        let n = self.n.unsigned_abs() as f64;
        n.powf(params.alpha()) + params.mu() * self.physical_amplitude().norm_sqr()
    }

    /// `sigma_h(n) + mu |A|^2 |n|^{-2s} |D_h(n)|^2`.
    pub fn discrete_frequency(&self, params: &ModelParams, lattice: Lattice) -> f64 {
        let d = cell_average_factor(lattice.h() * self.n as f64);
        symbol_sigma_h(lattice, params.alpha(), self.n)
            + params.mu() * self.physical_amplitude().norm_sqr() * d.norm_sqr()
    }

    /// The datum on a fine grid.
    pub fn initial_datum(&self, fine: Lattice) -> Result<ContinuumField> {
        ContinuumField::from_modes(fine, &[(self.n, 2.0 * PI * self.physical_amplitude())])
    }
}

/// `S(t) u0 = A |n|^{-s} e^{-it(|n|^alpha + mu |A|^2 |n|^{-2s})} e^{inx}` on the fine grid.
pub fn plane_wave_continuum(
    spec: &PlaneWaveSpec,
    params: &ModelParams,
    fine: Lattice,
    t: f64,
) -> Result<ContinuumField> {
    let c = spec.physical_amplitude() * Complex64::from_polar(1.0, -t * spec.continuum_frequency(params));
    ContinuumField::from_modes(fine, &[(spec.n, 2.0 * PI * c)])
}

/// Exact lattice solution started from `d_h u0`: `A |n|^{-s} D_h(n) e^{-it omega_h} e^{inx}`.
pub fn plane_wave_discrete(
    spec: &PlaneWaveSpec,
    params: &ModelParams,
    lattice: Lattice,
    t: f64,
) -> Result<Field> {
    if spec.n.unsigned_abs() as usize >= lattice.m() {
        return Err(Error::Aliased {
            n: spec.n,
            m: lattice.m(),
        });
    }
    let d = cell_average_factor(lattice.h() * spec.n as f64);
    let omega = spec.discrete_frequency(params, lattice);
    let c = spec.physical_amplitude() * d * Complex64::from_polar(1.0, -t * omega);
    Ok(Field::plane_wave(lattice, spec.n, c))
}

/// Leading coefficients of the two plane-wave error expansions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCoefficients {
    /// `lim ||p_h u_h(t) - u(t)||_{L^2(T)} / h = sqrt(pi/2) |A| |n|^{1-s}`.
    pub continuum: f64,
    /// `lim ||u_h(t) - d_h u(t)||_{L^2_h} / h^2
    ///   = (sqrt(2 pi)/24) |A| |t| |n|^{2-3s} |alpha |n|^{alpha+2s} + 2 mu |A|^2|`.
    pub discrete: f64,
}

/// Substitutes the spec into both error expansions.
///
/// The discrete coefficient comes from `omega_h - omega_0 = -(h^2/24) |n|^{2-2s}
/// (alpha |n|^{alpha+2s} + 2 mu |A|^2) + O(h^4)`; the amplitude `|A||n|^{-s}` and
/// the time `|t|` enter linearly.
pub fn predicted_error_coefficients(spec: &PlaneWaveSpec, params: &ModelParams, t: f64) -> ErrorCoefficients {
    let a = spec.amplitude.norm();
    let n = spec.n.unsigned_abs() as f64;
    let s = spec.s;
    let alpha = params.alpha();
    let continuum = (PI / 2.0).sqrt() * a * n.powf(1.0 - s);
    let bracket = (alpha * n.powf(alpha + 2.0 * s) + 2.0 * params.mu() * a * a).abs();
    let discrete = (2.0 * PI).sqrt() / 24.0 * a * t.abs() * n.powf(2.0 - 3.0 * s) * bracket;
    ErrorCoefficients { continuum, discrete }
}

/// Single-mode datum of the sharpness construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessDatum {
    /// `T^{-1/(2+alpha)} h^{-2/(2+alpha)}` before rounding.
    pub k0_exact: f64,
    /// Nearest integer, ties upward.
    pub k0: i64,
    /// `eps k0^{-alpha/2}`, the modulus of `u0`.
    pub amplitude: f64,
    pub field: ContinuumField,
}

/// `u0 = eps k0^{-alpha/2} e^{i k0 x}` with `k0 = T^{-1/(2+alpha)} h^{-2/(2+alpha)}` rounded,
/// so that `||u0||_{H^{alpha/2}} = eps sqrt(2 pi) (<k0>/k0)^{alpha/2}` stays O(1) in `h`.
pub fn sharpness_initial_datum(
    lattice: Lattice,
    params: &ModelParams,
    t_final: f64,
    eps: f64,
    fine: Lattice,
) -> Result<SharpnessDatum> {
    if !(eps > 0.0 && eps < std::f64::consts::FRAC_1_SQRT_2) {
        return domain(format!("eps = {eps} must lie in (0, 1/sqrt 2)"));
    }
    if !(t_final > 0.0 && t_final <= 1.0) {
        return domain(format!("T = {t_final} must lie in (0, 1]"));
    }
    let alpha = params.alpha();
    let k0_exact = t_final.powf(-1.0 / (2.0 + alpha)) * lattice.h().powf(-2.0 / (2.0 + alpha));
    let k0 = (k0_exact + 0.5).floor() as i64;
    let amplitude = eps * (k0 as f64).powf(-alpha / 2.0);
    let field = ContinuumField::from_modes(fine, &[(k0, Complex64::new(2.0 * PI * amplitude, 0.0))])?;
    Ok(SharpnessDatum {
        k0_exact,
        k0,
        amplitude,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{fractional_laplacian, sobolev_norm_h};
    use crate::transfer::discretize_dh;

    /// Sixth-order central difference of `f` at `t`.
    fn d_dt<F: Fn(f64) -> Vec<Complex64>>(f: F, t: f64, dlt: f64) -> Vec<Complex64> {
        let c = [(1.0, 45.0), (2.0, -9.0), (3.0, 1.0)];
        let mut out = vec![Complex64::new(0.0, 0.0); f(t).len()];
        for (m, w) in c {
            let p = f(t + m * dlt);
            let q = f(t - m * dlt);
            for (o, (a, b)) in out.iter_mut().zip(p.iter().zip(&q)) {
                *o += (a - b) * w / (60.0 * dlt);
            }
        }
        out
    }

    fn grid() -> Vec<(PlaneWaveSpec, ModelParams, f64)> {
        let mut v = vec![(
            PlaneWaveSpec::new(Complex64::new(2.0, 0.0), 3, 1.0).unwrap(),
            ModelParams::new(1.5, 1).unwrap(),
            0.7,
        )];
        for (i, (alpha, mu)) in [(1.2, -1i8), (2.0, -1), (0.8, 1), (1.7, 1)].into_iter().enumerate() {
            let a = Complex64::from_polar(0.5 + 0.4 * i as f64, 0.3 * i as f64);
            let n = [1i64, -2, 5, -7][i];
            let s = [0.0, 0.5, 1.3, 2.0][i];
            v.push((
                PlaneWaveSpec::new(a, n, s).unwrap(),
                ModelParams::new(alpha, mu).unwrap(),
                -0.4 + 0.9 * i as f64,
            ));
        }
        v
    }

    #[test]
    fn continuum_formula_solves_the_torus_equation() {
        let fine = Lattice::new(32).unwrap();
        for (spec, p, t) in grid() {
            let u = |t: f64| plane_wave_continuum(&spec, &p, fine, t).unwrap().to_physical().into_values();
            let ut = d_dt(u, t, 1e-3);
            let now = plane_wave_continuum(&spec, &p, fine, t).unwrap();
            let lin = now
                .apply_multiplier(|k| Complex64::new((k as f64).abs().powf(p.alpha()), 0.0))
                .to_physical();
            let phys = now.to_physical();
            for ((dt, l), v) in ut.iter().zip(lin.values()).zip(phys.values()) {
                let r = Complex64::i() * dt - l - p.mu() * v.norm_sqr() * v;
                assert!(r.norm() < 1e-10, "residual {}", r.norm());
            }
        }
    }

    #[test]
    fn discrete_formula_solves_the_lattice_equation() {
        let l = Lattice::new(16).unwrap();
        for (spec, p, t) in grid() {
            let u = |t: f64| plane_wave_discrete(&spec, &p, l, t).unwrap().into_values();
            let ut = d_dt(u, t, 1e-3);
            let now = plane_wave_discrete(&spec, &p, l, t).unwrap();
            let lin = fractional_laplacian(&now, p.alpha());
            for ((dt, lv), v) in ut.iter().zip(lin.values()).zip(now.values()) {
                let r = Complex64::i() * dt - lv - p.mu() * v.norm_sqr() * v;
                assert!(r.norm() < 1e-10, "residual {}", r.norm());
            }
        }
    }

    #[test]
    fn stationary_profile_and_initial_values() {
        let fine = Lattice::new(32).unwrap();
        let spec = PlaneWaveSpec::new(Complex64::new(1.0, 0.0), 1, 0.0).unwrap();
        let p = ModelParams::new(2.0, -1).unwrap();
        let u0 = spec.initial_datum(fine).unwrap();
        for t in [0.0, 0.3, 10.0] {
            assert!(plane_wave_continuum(&spec, &p, fine, t).unwrap().distance(&u0) < 1e-13);
        }
        let l = Lattice::new(8).unwrap();
        let g0 = plane_wave_discrete(&spec, &p, l, 0.0).unwrap();
        let dh = discretize_dh(&u0, l).unwrap().into_physical();
        assert!(g0.sub(&dh).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn aliased_and_invalid_specs() {
        let spec = PlaneWaveSpec::new(Complex64::new(1.0, 0.0), 8, 0.0).unwrap();
        let p = ModelParams::new(2.0, 1).unwrap();
        assert!(matches!(
            plane_wave_discrete(&spec, &p, Lattice::new(8).unwrap(), 0.0),
            Err(Error::Aliased { n: 8, m: 8 })
        ));
        assert!(PlaneWaveSpec::new(Complex64::new(1.0, 0.0), 0, 0.0).is_err());
        assert!(PlaneWaveSpec::new(Complex64::new(0.0, 0.0), 1, 0.0).is_err());
    }

    #[test]
    fn error_coefficients() {
        let spec = PlaneWaveSpec::new(Complex64::new(1.0, 0.0), 1, 0.0).unwrap();
        let foc = ModelParams::new(2.0, -1).unwrap();
        let def = ModelParams::new(2.0, 1).unwrap();
        let c = predicted_error_coefficients(&spec, &foc, 1.0);
        assert!((c.continuum - 1.25331).abs() < 1e-5);
        assert_eq!(c.discrete, 0.0);
        let c = predicted_error_coefficients(&spec, &def, 1.0);
        assert!((c.discrete - 0.417771).abs() < 1e-6, "{}", c.discrete);
    }

    #[test]
    fn discrete_coefficient_matches_measured_lattice_error() {
        // generic spec where |A t n|^{2-3s} and |A| |t| |n|^{2-3s} differ
        let spec = PlaneWaveSpec::new(Complex64::new(0.7, 0.3), 2, 0.5).unwrap();
        let p = ModelParams::new(1.5, 1).unwrap();
        let t = 1.7;
        let fine = Lattice::new(8192).unwrap();
        let c = predicted_error_coefficients(&spec, &p, t).discrete;
        let l = Lattice::new(1024).unwrap();
        let g = plane_wave_discrete(&spec, &p, l, t).unwrap();
        let dh = discretize_dh(&plane_wave_continuum(&spec, &p, fine, t).unwrap(), l).unwrap();
        let e = sobolev_norm_h(&g.sub(&dh).unwrap(), 0.0);
        assert!((e / l.h().powi(2) / c - 1.0).abs() < 1e-3, "{} vs {c}", e / l.h().powi(2));
    }

    #[test]
    fn sharpness_datum() {
        let fine = Lattice::new(4096).unwrap();
        let p = ModelParams::new(2.0, -1).unwrap();
        let d = sharpness_initial_datum(Lattice::new(64).unwrap(), &p, 1.0, 0.3, fine).unwrap();
        assert!((d.k0_exact - (64.0 / PI).sqrt()).abs() < 1e-12);
        assert!((d.k0_exact - 4.51).abs() < 0.01);
        assert_eq!(d.k0, 5);
        for alpha in [1.5, 2.0] {
            let p = ModelParams::new(alpha, -1).unwrap();
            for m in [32usize, 64, 128, 256, 512] {
                let d = sharpness_initial_datum(Lattice::new(m).unwrap(), &p, 0.5, 0.3, fine).unwrap();
                let ratio = d.field.sobolev_norm(alpha / 2.0) / (0.3 * (2.0 * PI).sqrt());
                assert!((0.9..=1.1).contains(&ratio), "M = {m}: {ratio}");
            }
        }
        let tiny = sharpness_initial_datum(Lattice::new(64).unwrap(), &p, 1.0, 1e-12, fine).unwrap();
        assert!(tiny.field.l2_norm() < 1e-10);
        assert!(sharpness_initial_datum(Lattice::new(64).unwrap(), &p, 1.0, 0.71, fine).is_err());
        let coarse_ref = Lattice::new(8).unwrap();
        assert!(matches!(
            sharpness_initial_datum(Lattice::new(64).unwrap(), &p, 1.0, 0.3, coarse_ref),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn rounding_ties_go_up() {
        // choose T so that k0 is exactly 2.5 for alpha = 2, h = pi/16
        let l = Lattice::new(16).unwrap();
        let p = ModelParams::new(2.0, 1).unwrap();
        let t = (2.5f64).powi(-4) * l.h().powi(-2);
        let d = sharpness_initial_datum(l, &p, t, 0.1, Lattice::new(128).unwrap()).unwrap();
        assert!((d.k0_exact - 2.5).abs() < 1e-12);
        assert_eq!(d.k0, 3);
    }
}
