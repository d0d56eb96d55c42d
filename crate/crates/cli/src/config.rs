use std::fs::{self, File};
use std::io::BufReader;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};

use ptmc_core::ising::{
    generate_layered, read_problem, IsingModel, LayeredParams, RegionPartition,
};
use ptmc_core::parallel::{Executor, ThrottleConfig};
use ptmc_core::ptmc::{geometric_ladder, parse_ladder, Mode};
use ptmc_core::rng::RngStream;

use crate::args::{ExecArgs, GeneratorArgs, LadderArgs, ProblemArgs, SimArgs};

#[derive(Debug, Clone)]
pub enum ProblemSource {
    File(PathBuf),
    Generated { params: LayeredParams, seed: u32 },
}

pub struct Problem {
    pub model: IsingModel,
    pub partition: Option<RegionPartition>,
}

impl ProblemSource {
    pub fn from_args(args: &ProblemArgs) -> Self {
        match &args.problem {
            Some(path) => ProblemSource::File(path.clone()),
            None => ProblemSource::Generated {
                params: layered_params(&args.generator),
                seed: args.generator.problem_seed,
            },
        }
    }

    pub fn load(&self) -> Result<Problem> {
        match self {
            ProblemSource::File(path) => {
                let file =
                    File::open(path).with_context(|| format!("opening {}", path.display()))?;
                let (model, partition) = read_problem(BufReader::new(file))
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(Problem { model, partition })
            }
            ProblemSource::Generated { params, seed } => {
                let p = generate_layered(params, &mut RngStream::new(*seed))?;
                Ok(Problem {
                    model: p.model,
                    partition: Some(p.partition),
                })
            }
        }
    }
}

pub fn layered_params(args: &GeneratorArgs) -> LayeredParams {
    let mut params = LayeredParams::new(args.qubits, args.copies);
    if let Some(t) = args.topology {
        params.topology = t;
    }
    params.coupling_dist = args.couplings;
    params.field_dist = args.fields;
    params.inter_slice = args.inter_slice;
    params
}

pub fn ladder(args: &LadderArgs) -> Result<Vec<f64>> {
    match &args.ladder {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(parse_ladder(&text)?)
        }
        None => Ok(geometric_ladder(args.tmin, args.tmax, args.chains)?),
    }
}

pub fn executor(args: &ExecArgs) -> Result<Executor> {
    let workers = args.workers.unwrap_or_else(Executor::default_workers);
    Ok(Executor::new(workers, args.priority)?)
}

pub fn throttle(args: &ExecArgs) -> Result<ThrottleConfig> {
    Ok(ThrottleConfig::new(args.duty_cycle, args.priority)?)
}

pub fn interval(seconds: f64) -> Result<Duration> {
    if !(seconds.is_finite() && seconds >= 0.0) {
        bail!("checkpoint interval must be a non-negative number of seconds, got {seconds}");
    }
    Ok(Duration::from_secs_f64(seconds))
}

/// Everything one simulation run needs besides the executor.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemSource,
    pub temperatures: Vec<f64>,
    pub total_sweeps: u64,
    pub sweeps_per_swap: u64,
    pub seed: u32,
    pub mode: Mode,
    pub throttle: ThrottleConfig,
    pub repetitions: usize,
}

impl RunConfig {
    pub fn new(problem: &ProblemArgs, sim: &SimArgs, throttle: ThrottleConfig) -> Result<Self> {
        let config = RunConfig {
            problem: ProblemSource::from_args(problem),
            temperatures: ladder(&sim.ladder)?,
            total_sweeps: sim.sweeps,
            sweeps_per_swap: sim.sweeps_per_swap,
            seed: sim.seed,
            mode: sim.mode,
            throttle,
            repetitions: sim.repetitions,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if self.sweeps_per_swap == 0 {
            bail!("sweeps per swap must be at least 1");
        }
        if self.temperatures.len() < 2 && self.total_sweeps > 0 {
            log::warn!("a single chain performs no swaps");
        }
        Ok(())
    }
}
