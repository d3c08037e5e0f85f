//! The oscillatory kernel of the lattice propagator, its short-time
//! dispersive bound, and the wavepacket showing that the bound's derivative
//! loss cannot be removed.

mod bound;
mod kernel;
mod phase;
mod strichartz;
mod wavepacket;

pub use bound::{dispersive_bound_check, BoundEntry, BoundTable, TimeGrid};
pub use kernel::{kernel_sum, kernel_sum_direct, lattice_convolution, low_frequency_flow};
pub use phase::{admissible_time, critical_frequencies, dispersive_rhs, PhaseSpec};
pub use strichartz::{
    space_time_norm, strichartz_smoke, StrichartzReport, CALIBRATION_FACTOR, STRICHARTZ_Q,
    STRICHARTZ_S,
};
pub use wavepacket::{
    blowup_wavepacket_demo, h_bound, wavepacket, Bump, WavepacketReport, WavepacketRow,
    BUMP_NODES, H_SAFETY,
};
