use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::linear_propagate_discrete;
use crate::error::{Error, Result};
use crate::spectral::{project_low, symbol_sigma_h, DyadicScale, Field, Lattice, ModelParams};

fn in_band(lattice: Lattice, scale: DyadicScale, k: i64) -> bool {
    (k as f64).abs() <= scale.cutoff(lattice)
}

/// `K_t(x) = (1/2 pi) sum_{|k| <= M N} e^{i(-t sigma_h(k) + kx)}` over the dual range.
pub fn kernel_sum(lattice: Lattice, params: &ModelParams, t: f64, scale: DyadicScale) -> Result<Field> {
    scale.check(lattice)?;
    let a = params.alpha();
    Ok(Field::from_coefficients(lattice, |k| {
        if in_band(lattice, scale, k) {
            Complex64::from_polar(1.0, -t * symbol_sigma_h(lattice, a, k))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .into_physical())
}

/// [`kernel_sum`] by direct summation, `O(M^2)`.
pub fn kernel_sum_direct(lattice: Lattice, params: &ModelParams, t: f64, scale: DyadicScale) -> Field {
    let a = params.alpha();
    let band: Vec<(i64, f64)> = lattice
        .frequencies()
        .filter(|&k| in_band(lattice, scale, k))
        .map(|k| (k, -t * symbol_sigma_h(lattice, a, k)))
        .collect();
    Field::from_fn(lattice, |x| {
        band.iter()
            .map(|&(k, p)| Complex64::from_polar(1.0, p + k as f64 * x))
            .sum::<Complex64>()
            / (2.0 * PI)
    })
}

/// `(a * b)(x) = h sum_y a(x - y) b(y)`, by direct summation.
pub fn lattice_convolution(a: &Field, b: &Field) -> Result<Field> {
    let l = a.lattice();
    if b.lattice() != l {
        return Err(Error::IncompatibleGrids(format!("M = {} vs M = {}", l.m(), b.lattice().m())));
    }
    let (a, b) = (a.to_physical(), b.to_physical());
    let h = l.h();
    let values = l
        .indices()
        .map(|i| {
            l.indices()
                .map(|j| a.values()[l.slot(i - j)] * b.values()[l.slot(j)])
                .sum::<Complex64>()
                * h
        })
        .collect();
    Field::physical(l, values)
}

/// `U_h(t) P_{<=N} f` through the spectral multipliers.
pub fn low_frequency_flow(f: &Field, params: &ModelParams, t: f64, scale: DyadicScale) -> Result<Field> {
    Ok(linear_propagate_discrete(&project_low(f, scale)?, t, params).into_physical())
}
