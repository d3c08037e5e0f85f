use std::f64::consts::PI;

use super::{Field, Representation};
use crate::error::{domain, Result};

/// Japanese bracket `(1 + |k|^2)^{1/2}`.
pub fn bracket(k: f64) -> f64 {
    (1.0 + k * k).sqrt()
}

/// `||f||_{H^s_h} = ((1/2 pi) sum_k <k>^{2s} |F_h f(k)|^2)^{1/2}`.
pub fn sobolev_norm_h(f: &Field, s: f64) -> f64 {
    let g = f.to_frequency();
    let sum: f64 = g
        .lattice()
        .frequencies()
        .zip(g.values())
        .map(|(k, v)| bracket(k as f64).powf(2.0 * s) * v.norm_sqr())
        .sum();
    (sum / (2.0 * PI)).sqrt()
}

/// `||f||_{L^p_h} = (h sum_x |f(x)|^p)^{1/p}`; `p = f64::INFINITY` gives the sup norm.
pub fn lebesgue_norm_h(f: &Field, p: f64) -> Result<f64> {
    f.expect(Representation::Physical)?;
    if !(p >= 1.0) {
        return domain(format!("Lebesgue exponent p = {p} must be >= 1"));
    }
    if p.is_infinite() {
        return Ok(f.values().iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let h = f.lattice().h();
    let sum: f64 = f.values().iter().map(|v| v.norm().powf(p)).sum();
    Ok((h * sum).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use crate::spectral::Lattice;
    use num_complex::Complex64;

    #[test]
    fn constant_has_single_mode_norm() {
        let l = Lattice::new(16).unwrap();
        let a = Complex64::new(0.6, -0.8) * 3.0;
        let f = Field::from_fn(l, |_| a);
        for s in [0.0, 0.5, 1.0, 2.5] {
            assert!((sobolev_norm_h(&f, s) - (2.0 * PI).sqrt() * a.norm()).abs() < 1e-12);
        }
        for p in [1.0, 2.0, 3.5] {
            let expected = (2.0 * PI).powf(1.0 / p) * a.norm();
            assert!((lebesgue_norm_h(&f, p).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_sobolev_norm() {
        let l = Lattice::new(16).unwrap();
        for n in [-7i64, 1, 5] {
            let f = Field::plane_wave(l, n, Complex64::new(1.0, 0.0));
            for s in [0.3, 1.0, 1.7] {
                let expected = (2.0 * PI).sqrt() * bracket(n as f64).powf(s);
                assert!((sobolev_norm_h(&f, s) - expected).abs() < 1e-11 * expected);
            }
        }
    }

    #[test]
    fn s_zero_matches_l2() {
        let l = Lattice::new(32).unwrap();
        let f = random_field(l, 5);
        let a = sobolev_norm_h(&f, 0.0);
        let b = lebesgue_norm_h(&f, 2.0).unwrap();
        assert!((a - b).abs() < 1e-12 * b);
    }

    #[test]
    fn holder_instance() {
        let l = Lattice::new(32).unwrap();
        for seed in 0..5 {
            let f = random_field(l, seed);
            let l1 = lebesgue_norm_h(&f, 1.0).unwrap();
            let l2 = lebesgue_norm_h(&f, 2.0).unwrap();
            let linf = lebesgue_norm_h(&f, f64::INFINITY).unwrap();
            assert!(l2 <= (l1 * linf).sqrt() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn embedding_constant_attained_by_delta() {
        // ||f||_{L^q_h} <= h^{1/q - 1/p} ||f||_{L^p_h}, with equality for a single-site delta
        let l = Lattice::new(20).unwrap();
        let h = l.h();
        let mut f = Field::zeros(l, Representation::Physical);
        f.values_mut()[7] = Complex64::new(2.0, 0.0);
        for (p, q) in [(1.0, 2.0), (2.0, 4.0), (1.0, f64::INFINITY)] {
            let lp = lebesgue_norm_h(&f, p).unwrap();
            let lq = lebesgue_norm_h(&f, q).unwrap();
            let c = h.powf(1.0 / q - 1.0 / p);
            assert!((lq - c * lp).abs() < 1e-12 * lq);
        }
        let g = random_field(l, 2);
        let c = h.powf(0.25 - 0.5);
        assert!(lebesgue_norm_h(&g, 4.0).unwrap() <= c * lebesgue_norm_h(&g, 2.0).unwrap());
    }

    #[test]
    fn rejects_small_exponent_and_wrong_representation() {
        let l = Lattice::new(4).unwrap();
        let f = random_field(l, 1);
        assert!(lebesgue_norm_h(&f, 0.5).is_err());
        assert!(lebesgue_norm_h(&f.to_frequency(), 2.0).is_err());
    }
}
