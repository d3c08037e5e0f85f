//! Transfer between the torus and the lattice: cell averages `d_h`,
//! piecewise-linear interpolation `p_h`, and the `L^2(T)` error functional.

mod continuum;
mod ops;

pub use continuum::ContinuumField;
pub use ops::{
    cell_average_factor, discretize_dh, interpolate_ph, interpolation_multiplier, l2_torus_error,
    l2_torus_error_quadrature, LinearInterpolant,
};
