//! Parallel tempering: Metropolis sweeps, adjacent-pair swaps and the
//! sweep/swap driver.

mod chain;
mod ensemble;
mod run;
mod sweep;

pub use chain::{Chain, ChainStats, ChainStreams, Mode};
pub use ensemble::{
    attempt_swap, format_ladder, geometric_ladder, parse_ladder, swap_acceptance, validate_ladder,
    Ensemble, SwapStats,
};
pub use run::{run, CheckpointPolicy, NoObserver, PhaseObserver, RunOptions, RunReport};
pub use sweep::{metropolis_accepts, sweep, sweep_regional, sweep_regional_serial};
