use num_complex::Complex64;

use super::{Field, Lattice};

/// Lattice fractional-Laplacian symbol `|2/h * sin(h xi / 2)|^alpha` at a real frequency.
pub fn sigma_at(h: f64, alpha: f64, xi: f64) -> f64 {
    (2.0 / h * (0.5 * h * xi).sin()).abs().powf(alpha)
}

/// `sigma_h(k)` on the dual lattice.
pub fn symbol_sigma_h(lattice: Lattice, alpha: f64, k: i64) -> f64 {
    sigma_at(lattice.h(), alpha, k as f64)
}

/// Continuum symbol `|k|^alpha`.
pub fn symbol_sigma_0(alpha: f64, k: f64) -> f64 {
    k.abs().powf(alpha)
}

/// `sigma_h` tabulated over the dual range `-M..M`.
pub fn sigma_table(lattice: Lattice, alpha: f64) -> Vec<f64> {
    lattice
        .frequencies()
        .map(|k| symbol_sigma_h(lattice, alpha, k))
        .collect()
}

/// `(-Delta_h)^{alpha/2} f`, returned in the representation of `f`.
pub fn fractional_laplacian(f: &Field, alpha: f64) -> Field {
    let l = f.lattice();
    f.apply_multiplier(|k| Complex64::new(symbol_sigma_h(l, alpha, k), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use std::f64::consts::PI;

    #[test]
    fn zero_mode_and_boundary_alias() {
        let l = Lattice::new(5).unwrap();
        assert_eq!(symbol_sigma_h(l, 2.0, 0), 0.0);
        let expected = (10.0 / PI).powi(2);
        assert!((symbol_sigma_h(l, 2.0, 5) - expected).abs() < 1e-12);
        assert!((expected - 10.1321).abs() < 1e-4);
        assert!((symbol_sigma_h(l, 2.0, -5) - expected).abs() < 1e-12);
    }

    #[test]
    fn even_and_monotone_in_modulus() {
        for m in [5usize, 16, 50] {
            let l = Lattice::new(m).unwrap();
            for alpha in [0.5, 1.0, 1.5, 2.0] {
                for k in 1..=m as i64 {
                    let a = symbol_sigma_h(l, alpha, k);
                    assert!((a - symbol_sigma_h(l, alpha, -k)).abs() <= 1e-12 * a);
                    assert!(a >= symbol_sigma_h(l, alpha, k - 1));
                }
            }
        }
    }

    #[test]
    fn converges_quadratically_to_continuum_symbol() {
        // Richardson-style order estimate on M = 2^j for fixed k = 3, alpha = 1.5.
        let target = 3f64.powf(1.5);
        assert!((target - 5.19615).abs() < 1e-5);
        let errs: Vec<f64> = (4..12)
            .map(|j| {
                let l = Lattice::new(1 << j).unwrap();
                (symbol_sigma_h(l, 1.5, 3) - target).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.9 && order < 2.1, "order {order}");
        }
        // Taylor: sigma_h - |k|^a = -(a/24) |k|^{a+2} h^2 + O(h^4)
        let l = Lattice::new(1 << 11).unwrap();
        let lead = 1.5 / 24.0 * 3f64.powf(3.5) * l.h().powi(2);
        assert!(((target - symbol_sigma_h(l, 1.5, 3)) / lead - 1.0).abs() < 1e-4);
    }

    #[test]
    fn alpha_two_is_the_centered_difference_laplacian() {
        let l = Lattice::new(16).unwrap();
        let f = random_field(l, 3);
        let lap = fractional_laplacian(&f, 2.0);
        let h2 = l.h() * l.h();
        for j in l.indices() {
            let fd = -(f.at_site(j + 1).unwrap() + f.at_site(j - 1).unwrap()
                - 2.0 * f.at_site(j).unwrap())
                / h2;
            assert!((lap.at_site(j).unwrap() - fd).norm() < 1e-10);
        }
    }
}
