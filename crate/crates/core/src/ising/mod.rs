//! Ising spin-glass models, region partitions and problem generation.

mod format;
mod generate;
mod model;
mod partition;

pub use format::{problem_to_string, read_problem, write_problem};
pub use generate::{
    build_layered, generate_layered, CouplerSpec, Disorder, LayeredParams, LayeredProblem, Topology,
};
pub use model::{Coupling, IsingModel, SpinState};
pub use partition::{verify_partition, Group, PartitionViolation, RegionPartition};
