//! Monte Carlo for the coupled triangulation–Potts ensemble: a joint chain of
//! local triangulation moves and Swendsen–Wang sweeps, validation against
//! exact laws, and a thermodynamic-integration free-energy estimator.

mod estimate;
mod state;
mod validate;

pub use estimate::{estimate_free_energy, FreeEnergyEstimate, NodeEstimate};
pub use state::{
    ChainParams, ChainState, MoveCounts, MoveKind, MoveOutcome, MoveStats, StepInfo,
    CACHE_CHECK_INTERVAL,
};
pub use validate::{
    exact_joint_law, joint_histogram_check, sw_histogram_check, CellReport, HistogramReport,
    CELL_Z_TOLERANCE, MAX_HISTOGRAM_CELLS,
};

use std::io::Write;

use crate::error::Result;

pub const TRACE_HEADER: &str = "step,n_t,energy,k_clusters,accept_rate";

/// Runs `steps` chain steps, writing a trace line every `every` steps.
pub fn run_with_trace<W: Write>(
    chain: &mut ChainState,
    steps: u64,
    every: u64,
    out: &mut W,
) -> Result<()> {
    let every = every.max(1);
    for _ in 0..steps {
        let info = chain.step()?;
        if chain.steps() % every == 0 {
            writeln!(
                out,
                "{},{},{},{},{:.6}",
                chain.steps(),
                chain.volume(),
                chain.energy(),
                info.clusters,
                chain.stats().acceptance_rate()
            )?;
        }
    }
    Ok(())
}
