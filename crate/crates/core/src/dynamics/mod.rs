//! Linear propagators, the Strang split-step integrator for the lattice and
//! torus equations, and conservation monitors.

mod config;
mod engine;
mod io;
mod linear;
mod state;

pub use config::{Scheme, SolverConfig};
pub use engine::{
    evolve_nonlinear, evolve_observed, evolve_to_end, ConservationLog, Trajectory,
    BLOW_UP_THRESHOLD,
};
pub use io::{write_conservation_csv, write_trajectory_csv, write_trajectory_ndjson};
pub use linear::{linear_propagate_continuum, linear_propagate_discrete};
pub use state::{discrete_energy, discrete_mass, Evolvable};
