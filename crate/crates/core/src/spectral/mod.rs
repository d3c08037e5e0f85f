//! Periodic lattice, discrete Fourier calculus, fractional symbols,
//! Littlewood-Paley projections and discrete norms.

mod field;
mod lattice;
mod norms;
mod projection;
mod symbol;
pub mod transform;

pub use field::{Field, Representation};
pub use lattice::{Lattice, ModelParams};
pub use norms::{bracket, lebesgue_norm_h, sobolev_norm_h};
pub use projection::{littlewood_paley_project, project_low, DyadicScale};
pub use symbol::{fractional_laplacian, sigma_at, sigma_table, symbol_sigma_0, symbol_sigma_h};

/// `F_h f` for a physical field.
pub fn forward_dft(f: &Field) -> crate::Result<Field> {
    f.forward_dft()
}

/// `F_h^{-1} g` for a frequency field.
pub fn inverse_dft(g: &Field) -> crate::Result<Field> {
    g.inverse_dft()
}
