use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use ptmc_core::ising::{Disorder, Topology};
use ptmc_core::parallel::WorkerPriority;
use ptmc_core::ptmc::Mode;

#[derive(Debug, Parser)]
#[command(
    name = "ptmc",
    version,
    about = "Parallel tempering Monte Carlo for Ising problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a layered problem file and a temperature ladder, and print its size.
    Generate(GenerateArgs),
    /// Run the simulation, possibly repeated, and write timing and statistics CSVs.
    Run(RunArgs),
    /// Run one workload at several worker counts and report speedups.
    Scaling(ScalingArgs),
    /// Run several problem sizes and report variables per second.
    Throughput(ThroughputArgs),
    /// Print the chain packing plan for a set of register budgets.
    PackPlan(PackPlanArgs),
    /// Continue a run from a checkpoint.
    Resume(ResumeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    #[arg(long, default_value_t = 8)]
    pub qubits: usize,
    /// Slices in the layered ring; must be even.
    #[arg(long, default_value_t = 128)]
    pub copies: usize,
    /// ring | complete | chimera; chimera when qubits is a multiple of 8, ring otherwise.
    #[arg(long)]
    pub topology: Option<Topology>,
    /// Coupling disorder: zero | pm1 | gauss.
    #[arg(long, default_value = "pm1")]
    pub couplings: Disorder,
    /// Field disorder: zero | pm1 | gauss.
    #[arg(long, default_value = "zero")]
    pub fields: Disorder,
    #[arg(long, default_value_t = 1.0)]
    pub inter_slice: f32,
    #[arg(long, default_value_t = 1)]
    pub problem_seed: u32,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Problem file; when absent the problem is generated.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LadderArgs {
    #[arg(long, default_value_t = 16)]
    pub chains: usize,
    #[arg(long, default_value_t = 0.2)]
    pub tmin: f64,
    #[arg(long, default_value_t = 3.0)]
    pub tmax: f64,
    /// Ladder file, one temperature per line, hottest first. Overrides --chains/--tmin/--tmax.
    #[arg(long)]
    pub ladder: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExecArgs {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Fraction of wall time spent computing, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub duty_cycle: f64,
    /// normal | below-normal
    #[arg(long, default_value = "normal")]
    pub priority: WorkerPriority,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[arg(long, default_value_t = 1000)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 10)]
    pub sweeps_per_swap: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u32,
    /// coarse | regional
    #[arg(long, default_value = "coarse")]
    pub mode: Mode,
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[arg(long, default_value = "problem.txt")]
    pub output: PathBuf,
    #[arg(long, default_value = "ladder.txt")]
    pub ladder_output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub exec: ExecArgs,
    #[arg(long, default_value = "summary.csv")]
    pub summary: PathBuf,
    #[arg(long, default_value = "stats.csv")]
    pub stats: PathBuf,
    /// Per-phase energies and rates of the first repetition.
    #[arg(long)]
    pub phases: Option<PathBuf>,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Seconds between checkpoints.
    #[arg(long, default_value_t = 60.0)]
    pub checkpoint_interval: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub worker_counts: Vec<usize>,
    #[arg(long, default_value = "normal")]
    pub priority: WorkerPriority,
    #[arg(long, default_value = "scaling.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ThroughputArgs {
    /// Problems as qubits:chains, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "8:27,16:34,32:37")]
    pub problems: Vec<String>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 0.2)]
    pub tmin: f64,
    #[arg(long, default_value_t = 3.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 1000)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 10)]
    pub sweeps_per_swap: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u32,
    #[arg(long, default_value = "coarse")]
    pub mode: Mode,
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    #[command(flatten)]
    pub exec: ExecArgs,
    #[arg(long, default_value = "throughput.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PackPlanArgs {
    #[arg(long)]
    pub chains: usize,
    #[arg(long)]
    pub processors: usize,
    #[arg(long, default_value_t = 32)]
    pub block_size: usize,
    #[arg(long, default_value_t = 512)]
    pub max_threads_per_block: usize,
    /// Register budgets per processor, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "16384")]
    pub registers: Vec<usize>,
    #[arg(long, default_value_t = 2048)]
    pub registers_per_chain_block: usize,
    /// Also write the table as CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ResumeArgs {
    /// Checkpoint to continue from; it is updated as the run proceeds.
    #[arg(long)]
    pub resume: PathBuf,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub exec: ExecArgs,
    /// Overrides the sweep target stored in the checkpoint.
    #[arg(long)]
    pub sweeps: Option<u64>,
    #[arg(long, default_value = "summary.csv")]
    pub summary: PathBuf,
    #[arg(long, default_value = "stats.csv")]
    pub stats: PathBuf,
    #[arg(long, default_value_t = 60.0)]
    pub checkpoint_interval: f64,
}
