//! Spectral simulator and verification laboratory for the fractional discrete
//! nonlinear Schrödinger equation
//!
//! ```text
//! i du/dt = (-Delta_h)^{alpha/2} u + mu |u|^2 u   on T_h = { h j : j = -M..M-1 },  h = pi / M
//! ```
//!
//! and its continuum limit on the torus.

pub mod error;
pub mod mi;
pub mod oracles;
pub mod quadrature;
pub mod random;
pub mod spectral;
pub mod convergence;
pub mod dispersive;
pub mod dynamics;
pub mod transfer;

pub use error::{Error, Result};
