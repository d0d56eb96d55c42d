//! Deterministic multi-threaded parallel tempering Monte Carlo for Ising
//! spin glasses.
//!
//! Two parallel schemes share one driver:
//!
//! * coarse: each worker sweeps whole chains claimed hottest-first from a
//!   work pool, one MT19937 stream per chain;
//! * regional: chains are split into two groups of independent regions and
//!   every region is swept with its own stream, one group at a time.
//!
//! Every random draw comes from a stream owned by exactly one chain, region
//! or the swap step, so a run's trajectory does not depend on the number of
//! workers or on scheduling order.

pub mod error;
pub mod ising;
pub mod parallel;
pub mod persist;
pub mod ptmc;
pub mod rng;

pub use error::{Error, Result};
