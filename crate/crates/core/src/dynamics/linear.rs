use num_complex::Complex64;

use crate::spectral::{symbol_sigma_0, symbol_sigma_h, Field, ModelParams};
use crate::transfer::ContinuumField;

/// `U_h(t) f`, multiplier `e^{-it sigma_h(k)}`; keeps the representation of `f`.
pub fn linear_propagate_discrete(f: &Field, t: f64, params: &ModelParams) -> Field {
    let l = f.lattice();
    let a = params.alpha();
    f.apply_multiplier(|k| Complex64::from_polar(1.0, -t * symbol_sigma_h(l, a, k)))
}

/// `U(t) u`, multiplier `e^{-it |k|^alpha}`.
pub fn linear_propagate_continuum(u: &ContinuumField, t: f64, params: &ModelParams) -> ContinuumField {
    let a = params.alpha();
    u.apply_multiplier(|k| Complex64::from_polar(1.0, -t * symbol_sigma_0(a, k as f64)))
}
