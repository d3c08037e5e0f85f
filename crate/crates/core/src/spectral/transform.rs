//! Discrete Fourier pair on the periodic lattice.
//!
//! `F_h f(k) = h * sum_x f(x) e^{-ikx}` and `F_h^{-1} g(x) = (2 pi)^{-1} * sum_k g(k) e^{ikx}`.
//!
//! Physical values are stored in site order `j = -M..M`, frequency values in
//! dual order `k = -M..M`. The fast path maps both onto a raw length-`2M` FFT:
//! with `m = j + M`, `e^{-ikhj} = (-1)^k e^{-2 pi i k m / 2M}`, so the
//! transform is a shifted FFT with an alternating sign. Any length is
//! handled by `rustfft`; the direct `O(M^2)` sum is kept as an oracle.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Lattice;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward and inverse plans for a raw transform of length `n`.
///
/// Plans are cached per thread; the returned handles are `Send + Sync`.
pub fn plan_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

fn alternating_sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Physical (site order) to frequency (dual order), in place.
pub(crate) fn forward_in_place(lattice: Lattice, data: &mut [Complex64]) {
    let n = lattice.len();
    debug_assert_eq!(data.len(), n);
    let (fwd, _) = plan_pair(n);
    fwd.process(data);
    // bins are ordered k = 0..2M; rotate so slot 0 holds k = -M
    data.rotate_right(lattice.m());
    let h = lattice.h();
    for (k, v) in lattice.frequencies().zip(data.iter_mut()) {
        *v *= h * alternating_sign(k);
    }
}

/// Frequency (dual order) to physical (site order), in place.
pub(crate) fn inverse_in_place(lattice: Lattice, data: &mut [Complex64]) {
    let n = lattice.len();
    debug_assert_eq!(data.len(), n);
    let scale = 1.0 / (2.0 * PI);
    for (k, v) in lattice.frequencies().zip(data.iter_mut()) {
        *v *= scale * alternating_sign(k);
    }
    data.rotate_left(lattice.m());
    let (_, inv) = plan_pair(n);
    inv.process(data);
}

/// Direct `O(M^2)` evaluation of `F_h`.
pub fn forward_direct(lattice: Lattice, values: &[Complex64]) -> Vec<Complex64> {
    let h = lattice.h();
    lattice
        .frequencies()
        .map(|k| {
            lattice
                .indices()
                .zip(values)
                .map(|(j, &f)| f * Complex64::from_polar(1.0, -(k as f64) * h * j as f64))
                .sum::<Complex64>()
                * h
        })
        .collect()
}

/// Direct `O(M^2)` evaluation of `F_h^{-1}`.
pub fn inverse_direct(lattice: Lattice, coefficients: &[Complex64]) -> Vec<Complex64> {
    let h = lattice.h();
    lattice
        .indices()
        .map(|j| {
            lattice
                .frequencies()
                .zip(coefficients)
                .map(|(k, &g)| g * Complex64::from_polar(1.0, k as f64 * h * j as f64))
                .sum::<Complex64>()
                / (2.0 * PI)
        })
        .collect()
}
