//! Continuum-limit experiments: `M`-sweeps of the lattice-versus-torus error,
//! rate fits, and the sharpness and compact-support studies.

mod datum;
mod experiments;
mod fit;

pub use datum::DatumSpec;
pub use experiments::{
    run_compact_support_experiment, run_continuum_limit, run_discrete_norm_convergence,
    run_sharpness_experiment, sweep_compact_support_kmax, CompactSupportReport, ExperimentOptions,
    KmaxSweep, SharpnessReport, SUPPORT_LEAK_TOLERANCE,
};
pub use fit::{fit_power_law, ConvergenceRecord, FitStatus, PowerLawFit, MIN_R_SQUARED, ZERO_ERROR};
