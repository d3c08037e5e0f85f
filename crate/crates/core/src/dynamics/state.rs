use std::f64::consts::PI;

use num_complex::Complex64;

use crate::spectral::{symbol_sigma_0, symbol_sigma_h, Field, Lattice, ModelParams};
use crate::transfer::ContinuumField;

/// A state the split-step engine can evolve: the lattice model on `T_h`, or
/// the torus model represented on a fine grid.
pub trait Evolvable: Sized {
    /// Grid carrying the samples.
    fn grid(&self) -> Lattice;
    /// Samples in site order.
    fn site_values(&self) -> Vec<Complex64>;
    /// Rebuilds a state from samples on `grid`.
    fn from_site_values(grid: Lattice, values: Vec<Complex64>) -> Self;
    /// Linear symbol at dual index `k` of the grid.
    fn symbol(grid: Lattice, params: &ModelParams, k: i64) -> f64;
    /// Spectral truncation applied after every nonlinear sub-step, if any.
    fn bandlimit(grid: Lattice) -> Option<usize>;
    fn mass(&self) -> f64;
    fn energy(&self, params: &ModelParams) -> f64;
}

impl Evolvable for Field {
    fn grid(&self) -> Lattice {
        self.lattice()
    }

    fn site_values(&self) -> Vec<Complex64> {
        self.to_physical().into_values()
    }

    fn from_site_values(grid: Lattice, values: Vec<Complex64>) -> Self {
        Field::physical(grid, values).expect("engine preserves length")
    }

    fn symbol(grid: Lattice, params: &ModelParams, k: i64) -> f64 {
        symbol_sigma_h(grid, params.alpha(), k)
    }

    fn bandlimit(_: Lattice) -> Option<usize> {
        None
    }

    fn mass(&self) -> f64 {
        discrete_mass(self)
    }

    fn energy(&self, params: &ModelParams) -> f64 {
        discrete_energy(self, params)
    }
}

impl Evolvable for ContinuumField {
    fn grid(&self) -> Lattice {
        self.lattice()
    }

    fn site_values(&self) -> Vec<Complex64> {
        self.to_physical().into_values()
    }

    fn from_site_values(grid: Lattice, values: Vec<Complex64>) -> Self {
        ContinuumField::from_field(&Field::physical(grid, values).expect("engine preserves length"))
    }

    fn symbol(_: Lattice, params: &ModelParams, k: i64) -> f64 {
        symbol_sigma_0(params.alpha(), k as f64)
    }

    fn bandlimit(grid: Lattice) -> Option<usize> {
        Some(ContinuumField::zeros(grid).bandlimit())
    }

    fn mass(&self) -> f64 {
        self.l2_norm().powi(2)
    }

    fn energy(&self, params: &ModelParams) -> f64 {
        let kinetic: f64 = self
            .modes()
            .map(|(k, c)| symbol_sigma_0(params.alpha(), k as f64) * c.norm_sqr())
            .sum::<f64>()
            / (2.0 * PI);
        // exact: |u|^4 has frequencies below 4 K_ref < 2 M_ref
        let fine = self.lattice();
        let quartic: f64 =
            fine.h() * self.to_physical().values().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>();
        0.5 * kinetic + 0.25 * params.mu() * quartic
    }
}

/// `M_h = ||u||^2_{L^2_h}`.
pub fn discrete_mass(u: &Field) -> f64 {
    let p = u.to_physical();
    p.lattice().h() * p.values().iter().map(|v| v.norm_sqr()).sum::<f64>()
}

/// `H_h = (1/2) || |grad_h|^{alpha/2} u ||^2_{L^2_h} + (mu/4) ||u||^4_{L^4_h}`.
pub fn discrete_energy(u: &Field, params: &ModelParams) -> f64 {
    let l = u.lattice();
    let g = u.to_frequency();
    let kinetic: f64 = l
        .frequencies()
        .zip(g.values())
        .map(|(k, v)| symbol_sigma_h(l, params.alpha(), k) * v.norm_sqr())
        .sum::<f64>()
        / (2.0 * PI);
    let p = u.to_physical();
    let quartic: f64 = l.h() * p.values().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>();
    0.5 * kinetic + 0.25 * params.mu() * quartic
}
