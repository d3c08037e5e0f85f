use super::*;
use crate::random::{phase_for, random_field};
use crate::spectral::{bracket, lebesgue_norm_h};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Bandlimited datum with `|u_hat(k)| = 2 pi <k>^{-decay}` and seeded phases.
fn random_datum(fine: Lattice, seed: u64, kmax: i64, decay: f64) -> ContinuumField {
    ContinuumField::from_coefficients(fine, |k| {
        if k.abs() <= kmax {
            2.0 * PI * bracket(k as f64).powf(-decay) * phase_for(seed, k)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn log_log_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn average_of_constant_is_constant() {
    let fine = Lattice::new(64).unwrap();
    let a = Complex64::new(-0.3, 2.0);
    let u = ContinuumField::from_fn(fine, |_| a);
    let g = discretize_dh(&u, Lattice::new(8).unwrap()).unwrap().into_physical();
    for v in g.values() {
        assert!((v - a).norm() < 1e-13);
    }
}

#[test]
fn plane_wave_picks_up_cell_average_factor() {
    let fine = Lattice::new(256).unwrap();
    let coarse = Lattice::new(16).unwrap();
    let h = coarse.h();
    for n in [1i64, -3, 7, 20, -40] {
        let u = ContinuumField::from_modes(fine, &[(n, 2.0 * PI * one())]).unwrap();
        let g = discretize_dh(&u, coarse).unwrap().into_physical();
        let d = (Complex64::from_polar(1.0, h * n as f64) - 1.0) / Complex64::new(0.0, h * n as f64);
        for (x, v) in coarse.sites().zip(g.values()) {
            assert!((v - d * Complex64::from_polar(1.0, n as f64 * x)).norm() < 1e-12, "n = {n}");
        }
    }
    // n a nonzero multiple of 2M averages to zero
    let u = ContinuumField::from_modes(fine, &[(32, one())]).unwrap();
    assert!(discretize_dh(&u, coarse).unwrap().sup_norm() < 1e-15);
}

#[test]
fn spectral_average_matches_quadrature_average() {
    let fine = Lattice::new(256).unwrap();
    let coarse = Lattice::new(16).unwrap();
    let u = random_datum(fine, 42, 127, 0.8);
    let g = discretize_dh(&u, coarse).unwrap().into_physical();
    let h = coarse.h();
    let (xs, ws) = gauss_legendre(12);
    let sub = 16;
    for j in coarse.indices() {
        let x0 = coarse.site(j);
        let mut avg = Complex64::new(0.0, 0.0);
        for c in 0..sub {
            let a = x0 + h * c as f64 / sub as f64;
            for (x, w) in xs.iter().zip(&ws) {
                avg += u.evaluate(a + 0.5 * (x + 1.0) * h / sub as f64) * (0.5 * w / sub as f64);
            }
        }
        assert!((g.at_site(j).unwrap() - avg).norm() < 1e-10, "cell {j}");
    }
}

#[test]
fn incompatible_grids_are_rejected() {
    let u = ContinuumField::zeros(Lattice::new(100).unwrap());
    assert!(matches!(
        discretize_dh(&u, Lattice::new(16).unwrap()),
        Err(Error::IncompatibleGrids(_))
    ));
    let g = random_field(Lattice::new(16).unwrap(), 1);
    assert!(l2_torus_error(&g, &ContinuumField::zeros(Lattice::new(64).unwrap())).is_err());
}

#[test]
fn interpolation_symbol_values() {
    let l = Lattice::new(16).unwrap();
    assert_eq!(interpolation_multiplier(l, 0), 1.0);
    let at_m = interpolation_multiplier(l, 16);
    assert!((at_m - 4.0 / (PI * PI)).abs() < 1e-15);
    assert!((at_m - 0.405285).abs() < 1e-6);
    for k in -100..100 {
        let p = interpolation_multiplier(l, k);
        assert!((0.0..=1.0).contains(&p));
    }
    // P_h(k) -> 1 at order 2 in h for fixed k
    let errs: Vec<f64> = (5..12)
        .map(|j| 1.0 - interpolation_multiplier(Lattice::new(1 << j).unwrap(), 3))
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.02, "order {order}");
    }
}

#[test]
fn alias_energy_identity() {
    let l = Lattice::new(8).unwrap();
    for k in l.frequencies() {
        let direct: f64 = (-20000i64..=20000)
            .map(|q| interpolation_multiplier(l, k + 16 * q).powi(2))
            .sum();
        assert!((direct - alias_energy(l, k)).abs() < 1e-12, "k = {k}");
    }
}

#[test]
fn interpolant_of_constant_and_sup_bound() {
    let coarse = Lattice::new(16).unwrap();
    let fine = Lattice::new(128).unwrap();
    let a = Complex64::new(0.7, -0.1);
    let p = interpolate_ph(&Field::from_fn(coarse, |_| a), fine).unwrap();
    assert!(p.samples().iter().all(|v| (v - a).norm() < 1e-15));
    for seed in 0..20 {
        let g = random_field(coarse, seed);
        let p = interpolate_ph(&g, fine).unwrap();
        let gmax = lebesgue_norm_h(&g, f64::INFINITY).unwrap();
        assert!(p.sup_norm() <= 3.0 * gmax);
        assert!((p.evaluate(0.123) - p.evaluate(0.123 + 2.0 * PI)).norm() < 1e-12);
    }
}

#[test]
fn pointwise_and_multiplier_routes_agree() {
    // Route 1: exact coefficients of the piecewise-linear function through the
    // fine samples (the fine grid refines the coarse one, so it is the same
    // function). Route 2: P_h(k) F_h g(k mod 2M).
    let coarse = Lattice::new(16).unwrap();
    let fine = Lattice::new(256).unwrap();
    for seed in 0..4 {
        let g = random_field(coarse, seed);
        let p = interpolate_ph(&g, fine).unwrap();
        let samples = p.sample_field().into_frequency();
        let window = 8 * fine.m() as i64;
        let diff: f64 = (-window..window)
            .map(|k| {
                let route1 = samples.values()[fine.slot(k)] * interpolation_multiplier(fine, k);
                (route1 - p.coefficient(k)).norm_sqr()
            })
            .sum();
        assert!((diff / (2.0 * PI)).sqrt() < 1e-10);
    }
}

#[test]
fn fourier_and_quadrature_error_functionals_agree() {
    let coarse = Lattice::new(16).unwrap();
    let fine = Lattice::new(256).unwrap();
    for seed in 0..3 {
        let u = random_datum(fine, seed, 60, 1.2);
        let g = random_field(coarse, seed + 100);
        let a = l2_torus_error(&g, &u).unwrap();
        let b = l2_torus_error_quadrature(&g, &u, 10).unwrap();
        assert!((a - b).abs() < 1e-10 * a.max(1.0), "{a} vs {b}");
        let dh = discretize_dh(&u, coarse).unwrap();
        let a = l2_torus_error(&dh, &u).unwrap();
        let b = l2_torus_error_quadrature(&dh, &u, 10).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn identical_inputs_give_zero_error() {
    let fine = Lattice::new(128).unwrap();
    let coarse = Lattice::new(16).unwrap();
    let u = ContinuumField::from_fn(fine, |_| Complex64::new(2.0, 1.0));
    let g = discretize_dh(&u, coarse).unwrap();
    assert!(l2_torus_error(&g, &u).unwrap() < 1e-13);
}

#[test]
fn single_mode_error_leading_term() {
    // p_h d_h e^{ix} - e^{ix} has coefficient 2 pi (P_h(1) D(h) - 1) = 2 pi (ih/2 + O(h^2))
    // at k = 1, so the error is sqrt(2 pi) h / 2 = sqrt(pi/2) h to leading order.
    for m in [16usize, 64, 256] {
        let coarse = Lattice::new(m).unwrap();
        let fine = Lattice::new(8 * m).unwrap();
        let u = ContinuumField::from_modes(fine, &[(1, 2.0 * PI * one())]).unwrap();
        let g = discretize_dh(&u, coarse).unwrap();
        let e = l2_torus_error(&g, &u).unwrap();
        let lead = (PI / 2.0).sqrt() * coarse.h();
        assert!((e / lead - 1.0).abs() < 0.6 * coarse.h(), "M = {m}: {e} vs {lead}");
        if m == 16 {
            let q = l2_torus_error_quadrature(&g, &u, 8).unwrap();
            assert!((q - e).abs() < 1e-10);
        }
    }
}

#[test]
fn interpolation_of_averages_is_first_order_on_smooth_data() {
    let fine = Lattice::new(2048).unwrap();
    let u = random_datum(fine, 9, 12, 3.0);
    let ms = [16usize, 32, 64, 128];
    let hs: Vec<f64> = ms.iter().map(|&m| PI / m as f64).collect();
    let es: Vec<f64> = ms
        .iter()
        .map(|&m| {
            let g = discretize_dh(&u, Lattice::new(m).unwrap()).unwrap();
            l2_torus_error(&g, &u).unwrap()
        })
        .collect();
    let slope = log_log_slope(&hs, &es);
    assert!(slope >= 0.98, "slope {slope}");
    for (h, e) in hs.iter().zip(&es) {
        assert!(*e <= h * u.sobolev_norm(1.0));
    }
}

#[test]
fn interpolation_of_averages_rate_tracks_regularity() {
    // |u_hat(k)| ~ <k>^{-s - 1/2 - 0.05}, s = 0.5: rate about min(s, 1)
    let fine = Lattice::new(4096).unwrap();
    let s = 0.5;
    let u = random_datum(fine, 3, 2047, s + 0.55);
    let ms = [16usize, 32, 64, 128];
    let hs: Vec<f64> = ms.iter().map(|&m| PI / m as f64).collect();
    let es: Vec<f64> = ms
        .iter()
        .map(|&m| {
            let g = discretize_dh(&u, Lattice::new(m).unwrap()).unwrap();
            l2_torus_error(&g, &u).unwrap()
        })
        .collect();
    let slope = log_log_slope(&hs, &es);
    assert!((slope - s).abs() < 0.15, "slope {slope}");
}

#[test]
fn averaging_is_bounded_in_l2() {
    let fine = Lattice::new(512).unwrap();
    for seed in 0..5 {
        let u = random_datum(fine, seed, 255, 0.3);
        for m in [4usize, 16, 64] {
            let g = discretize_dh(&u, Lattice::new(m).unwrap()).unwrap().into_physical();
            assert!(lebesgue_norm_h(&g, 2.0).unwrap() <= u.l2_norm() * (1.0 + 1e-12));
        }
    }
}
