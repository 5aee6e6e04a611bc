//! Bounds on partition functions and on the critical curve of the coupled model.

mod annealed;
mod curves;
mod partition;

pub use annealed::{annealed_lower_bound, annealed_sandwich, annealed_upper_bound, mu_tilde, AnnealedBound};
pub use curves::{
    asymptote, asymptote_check, classify_point, curve_table, free_energy_sandwich, ising_critical_commentary,
    log_grid, lower_curve, phi_inf, phi_sup, region_map_phi, small_beta_constant, upper_curve, AsymptoteCheck,
    CurveRow, CurveTable, FreeEnergySandwich, RegionVerdict, LARGE_BETA, LARGE_BETA_TOLERANCE, SMALL_BETA,
    SMALL_BETA_TOLERANCE,
};
pub use partition::{
    circuit_bound_diagnostic, high_t_upper_bound, high_t_upper_bound_counts, lower_bounds_zp, zp_domination,
    CircuitReport, CircuitViolation,
};
