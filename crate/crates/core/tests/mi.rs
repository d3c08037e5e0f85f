use fdnls_core::dynamics::SolverConfig;
use fdnls_core::mi::*;
use fdnls_core::spectral::{Lattice, ModelParams};

fn lattice50() -> Lattice {
    Lattice::new(50).unwrap()
}

#[test]
fn sideband_growth_matches_linear_gain() {
    let p = ModelParams::new(2.0, -1).unwrap();
    let cw = CWSpec::with_modes(1.0, 1e-6, &[1]).unwrap();
    let cfg = SolverConfig::new(1e-3, 16.0, 20).unwrap();
    let r = measure_sideband_growth(&cw, lattice50(), &p, &cfg, &[1]).unwrap();
    let g1 = &r.modes[0];
    println!("k=1 slope {:?} predicted {} window {:?}", g1.slope, g1.predicted, g1.window);
    assert_eq!(g1.status, GrowthStatus::Growing);
    assert!(g1.relative_deviation().unwrap() < 0.05);
}

#[test]
fn mode_outside_the_unstable_set_is_stable() {
    let p = ModelParams::new(2.0, -1).unwrap();
    let cw = CWSpec::with_modes(1.0, 1e-6, &[10]).unwrap();
    let cfg = SolverConfig::new(1e-3, 16.0, 20).unwrap();
    let r = measure_sideband_growth(&cw, lattice50(), &p, &cfg, &[10]).unwrap();
    assert_eq!(r.modes[0].predicted, 0.0);
    assert_eq!(r.modes[0].status, GrowthStatus::Stable);
    assert!(r.modes[0].amplitudes.iter().all(|&a| a <= 1e-5));
}

#[test]
fn defocusing_control_is_stable() {
    let p = ModelParams::new(2.0, 1).unwrap();
    let ks = [1, 2, 5, -3];
    let cw = CWSpec::with_modes(1.0, 1e-6, &ks).unwrap();
    let cfg = SolverConfig::new(1e-3, 16.0, 20).unwrap();
    let r = measure_sideband_growth(&cw, lattice50(), &p, &cfg, &ks).unwrap();
    assert!(r.modes.iter().all(|m| m.status == GrowthStatus::Stable));
}

#[test]
fn small_amplitude_gain_is_quadratic() {
    let p = ModelParams::new(2.0, -1).unwrap();
    let rows = sweep_max_gain(&p, lattice50(), &[0.25, 0.6, 0.8, 1.0, 1.5], 1e-6).unwrap();
    for r in &rows {
        println!(
            "A {} k_m {} theory {} prime {} measured {:?} {:?}",
            r.amplitude, r.k_m, r.omega_theory, r.omega_prime, r.slope_measured, r.status
        );
        let ratio = r.omega_prime / (r.amplitude * r.amplitude);
        assert!((0.95..=1.05).contains(&ratio));
        if r.omega_theory > 0.0 {
            assert_eq!(r.status, GrowthStatus::Growing);
            assert!((r.slope_measured.unwrap() / r.omega_theory - 1.0).abs() < 0.05);
        } else {
            assert_eq!(r.status, GrowthStatus::Stable);
        }
    }
    assert!(sweep_max_gain(&p, lattice50(), &[1.0, 0.5], 1e-6).is_err());
}

#[test]
fn recurrence_is_more_regular_for_the_laplacian() {
    let l = lattice50();
    let cw = CWSpec::with_modes(1.0, 1e-6, &[1, -1]).unwrap();
    let cfg = SolverConfig::new(1e-3, 120.0, 10).unwrap();
    let mut out = Vec::new();
    for alpha in [2.0, 1.1] {
        let p = ModelParams::new(alpha, -1).unwrap();
        let (_, d) = run_recurrence(&cw, l, &p, &cfg).unwrap();
        println!(
            "alpha {alpha}: first {:?}, {} events, irregularity {}",
            d.first_localization_time,
            d.recurrence_times.len(),
            d.irregularity_index
        );
        out.push(d);
    }
    assert!(out.iter().all(|d| d.first_localization_time.is_some()));
    assert!(out[0].irregularity_index < out[1].irregularity_index);
}
