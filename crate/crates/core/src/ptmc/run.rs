use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use log::{debug, info};

use crate::error::{Error, Result};
use crate::ising::{verify_partition, IsingModel, RegionPartition};
use crate::parallel::{plan_packing, throttle, Executor, PackingRequest, ThrottleConfig, WorkPool};
use crate::persist;
use crate::ptmc::chain::Mode;
use crate::ptmc::ensemble::Ensemble;
use crate::ptmc::sweep::{regional_sweeps, sweep};

/// Called after every swap phase, with all workers parked.
pub trait PhaseObserver {
    fn on_phase(&mut self, ensemble: &Ensemble) -> Result<()>;
}

/// Observer that records nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoObserver;

impl PhaseObserver for NoObserver {
    fn on_phase(&mut self, _: &Ensemble) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointPolicy {
    pub path: PathBuf,
    /// Minimum wall-clock time between checkpoints. The final state is always written.
    pub interval: Duration,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Sweeps every chain should have received when the run ends, rounded up
    /// to a whole number of swap phases.
    pub total_sweeps: u64,
    pub throttle: ThrottleConfig,
    pub checkpoint: Option<CheckpointPolicy>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub phases: u64,
    /// Requested sweep target after rounding up to whole phases.
    pub target_sweeps: u64,
    pub rounded_up: bool,
    /// Sweeping, swapping and measurement time; excludes I/O and throttle idle.
    pub pt_time: Duration,
    pub idle_time: Duration,
    /// Checkpoint writes and observer callbacks.
    pub io_time: Duration,
    pub total_time: Duration,
    pub checkpoints_written: u64,
}

impl RunReport {
    /// Fraction of wall-clock time spent computing.
    pub fn active_fraction(&self) -> f64 {
        let total = self.total_time.as_secs_f64();
        if total == 0.0 {
            return 1.0;
        }
        self.pt_time.as_secs_f64() / total
    }
}

/// Repeats sweep phase, swap phase and measurement until every chain has
/// received the target number of sweeps.
pub fn run(
    ensemble: &mut Ensemble,
    model: &IsingModel,
    partition: Option<&RegionPartition>,
    executor: &Executor,
    options: &RunOptions,
    observer: &mut dyn PhaseObserver,
) -> Result<RunReport> {
    let started = Instant::now();
    let sps = ensemble.sweeps_per_swap;
    let target = options.total_sweeps.div_ceil(sps) * sps;
    let mut report = RunReport {
        target_sweeps: target,
        rounded_up: target != options.total_sweeps,
        ..RunReport::default()
    };
    if report.rounded_up {
        info!(
            "total sweeps {} rounded up to {target} ({} per swap)",
            options.total_sweeps, sps
        );
    }
    if let Some(c) = ensemble
        .chains
        .iter()
        .find(|c| c.state.len() != model.num_sites())
    {
        return Err(Error::SizeMismatch {
            expected: model.num_sites(),
            actual: c.state.len(),
        });
    }

    let partition = match ensemble.mode {
        Mode::Coarse => None,
        Mode::Regional => {
            let p = partition.ok_or_else(|| {
                Error::InvalidArgument("regional mode needs a region partition".into())
            })?;
            verify_partition(model, p).map_err(|v| Error::InvalidPartition(v.to_string()))?;
            let req = PackingRequest {
                block_size: p.num_regions().div_ceil(2).clamp(1, 512),
                ..PackingRequest::new(ensemble.len(), executor.workers())
            };
            if let Ok(plan) = plan_packing(&req) {
                debug!("regional packing plan: {plan:?}");
            }
            Some(p)
        }
    };

    let pool = WorkPool::by_temperature(&ensemble.temperatures());
    let mut last_checkpoint = Instant::now();

    while ensemble.sweep_counter < target {
        let burst = Instant::now();
        match partition {
            None => coarse_phase(ensemble, model, executor, &pool)?,
            Some(p) => {
                regional_sweeps(&mut ensemble.chains, model, p, executor, sps)?;
                refresh_energies(ensemble, model, executor, &pool)?;
            }
        }
        ensemble.sweep_counter += sps;
        ensemble.swap_phase();
        ensemble.record_measurements();
        let active = burst.elapsed();
        report.pt_time += active;
        report.phases += 1;

        let io = Instant::now();
        observer.on_phase(ensemble)?;
        if let Some(policy) = &options.checkpoint {
            let last = ensemble.sweep_counter >= target;
            if last || last_checkpoint.elapsed() >= policy.interval {
                persist::save(ensemble, model, target, &policy.path)?;
                report.checkpoints_written += 1;
                last_checkpoint = Instant::now();
            }
        }
        report.io_time += io.elapsed();

        let idle = throttle(&options.throttle, active);
        if !idle.is_zero() {
            std::thread::sleep(idle);
            report.idle_time += idle;
        }
    }

    report.total_time = started.elapsed();
    Ok(report)
}

fn coarse_phase(
    ensemble: &mut Ensemble,
    model: &IsingModel,
    executor: &Executor,
    pool: &WorkPool,
) -> Result<()> {
    let sps = ensemble.sweeps_per_swap;
    let slots: Vec<Mutex<_>> = ensemble.chains.iter_mut().map(Mutex::new).collect();
    executor.run_phase(pool, |c| {
        let mut chain = slots[c].lock().unwrap();
        for _ in 0..sps {
            sweep(&mut chain, model)?;
        }
        chain.refresh_energy(model);
        Ok(())
    })
}

fn refresh_energies(
    ensemble: &mut Ensemble,
    model: &IsingModel,
    executor: &Executor,
    pool: &WorkPool,
) -> Result<()> {
    let slots: Vec<Mutex<_>> = ensemble.chains.iter_mut().map(Mutex::new).collect();
    executor.run_phase(pool, |c| {
        slots[c].lock().unwrap().refresh_energy(model);
        Ok(())
    })
}
