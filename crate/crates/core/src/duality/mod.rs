//! Duality between the Potts model on a causal triangulation and on its dual.

mod annealed;
mod checks;
mod params;

pub use annealed::{
    annealed_duality_check, quenched_free_energy_offset, AnnealedEnsemble, AnnealedReport, TRUNCATION_NOTE,
};
pub use checks::{fk_duality_check, potts_duality_check, FkDualityContext, PottsDualityContext};
pub use params::{dual_beta, dual_point, p_star, self_dual_p, CoupledParams};
