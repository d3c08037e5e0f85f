//! Modulational instability of continuous waves: linear theory, measured
//! sideband growth, and recurrence of localization.

mod growth;
mod recurrence;
mod theory;

pub use growth::{
    growth_window_slope, measure_sideband_growth, sweep_max_gain, CWSpec, GainRow, GrowthStatus,
    SidebandGrowth, SidebandReport, MAX_EPS,
};
pub use recurrence::{
    recurrence_diagnostic, run_recurrence, sup_history, RecurrenceDiagnostic, SupHistory,
    LOCALIZATION_FACTOR,
};
pub use theory::{
    gain, in_instability_region, instability_region, mi_dispersion, omega_sq, xi_m, GainRegime,
    MIReport, RegionCell,
};
