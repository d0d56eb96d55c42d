use std::cmp::Ordering as CmpOrdering;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use log::{debug, warn};

use crate::error::{Error, Result};

/// Chains in claim order plus the shared claim index of the current phase.
#[derive(Debug)]
pub struct WorkPool {
    order: Vec<usize>,
    next: AtomicUsize,
}

impl WorkPool {
    /// Hottest chain first; equal temperatures keep index order.
    pub fn by_temperature(temperatures: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..temperatures.len()).collect();
        order.sort_by(|&a, &b| {
            temperatures[b]
                .partial_cmp(&temperatures[a])
                .unwrap_or(CmpOrdering::Equal)
        });
        WorkPool::from_order(order)
    }

    /// Claims `0..n` in order.
    pub fn sequential(n: usize) -> Self {
        WorkPool::from_order((0..n).collect())
    }

    fn from_order(order: Vec<usize>) -> Self {
        WorkPool {
            order,
            next: AtomicUsize::new(0),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Next unclaimed task of this phase, or `None` once all are claimed.
    #[inline]
    pub fn claim_next(&self) -> Option<usize> {
        let slot = self.next.fetch_add(1, Ordering::Relaxed);
        self.order.get(slot).copied()
    }

    pub fn reset(&self) {
        self.next.store(0, Ordering::Relaxed);
    }
}

/// Work pool for the given per-chain temperatures.
pub fn build_work_pool(temperatures: &[f64]) -> Result<WorkPool> {
    if temperatures.is_empty() {
        return Err(Error::InvalidArgument(
            "work pool needs at least one chain".into(),
        ));
    }
    Ok(WorkPool::by_temperature(temperatures))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorkerPriority {
    BelowNormal,
    #[default]
    Normal,
}

impl FromStr for WorkerPriority {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "below-normal" => Ok(WorkerPriority::BelowNormal),
            "normal" => Ok(WorkerPriority::Normal),
            other => Err(Error::InvalidArgument(format!(
                "unknown priority '{other}'"
            ))),
        }
    }
}

impl fmt::Display for WorkerPriority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorkerPriority::BelowNormal => "below-normal",
            WorkerPriority::Normal => "normal",
        })
    }
}

/// Persistent workers shared by every phase of a run.
///
/// Threads are created once; each [`Executor::run_phase`] wakes all of them,
/// lets them drain a [`WorkPool`], and returns only when every worker is
/// done, which acts as the phase barrier.
pub struct Executor {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl fmt::Debug for Executor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers)
            .finish()
    }
}

impl Executor {
    pub fn new(workers: usize, priority: WorkerPriority) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidArgument("need at least one worker".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("ptmc-worker-{i}"))
            .start_handler(move |i| {
                if priority == WorkerPriority::BelowNormal {
                    lower_thread_priority(i);
                }
            })
            .build()
            .map_err(|e| Error::Pool(e.to_string()))?;
        Ok(Executor { pool, workers })
    }

    /// One worker per available core.
    pub fn default_workers() -> usize {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Resets `pool`, then every worker claims and runs tasks until the pool
    /// is exhausted. A failing task does not stop the others; after the
    /// barrier the failure of the lowest task index is returned.
    pub fn run_phase<F>(&self, pool: &WorkPool, work: F) -> Result<()>
    where
        F: Fn(usize) -> Result<()> + Sync,
    {
        pool.reset();
        let failures: Mutex<Vec<(usize, Error)>> = Mutex::new(Vec::new());
        self.pool.broadcast(|_| {
            while let Some(task) = pool.claim_next() {
                if let Err(e) = work(task) {
                    failures.lock().unwrap().push((task, e));
                }
            }
        });
        let mut failures = failures.into_inner().unwrap();
        failures.sort_by_key(|(task, _)| *task);
        match failures.into_iter().next() {
            Some((_, e)) => Err(e),
            None => Ok(()),
        }
    }
}

#[cfg(unix)]
fn lower_thread_priority(worker: usize) {
    // On Linux the nice value is per thread and `who == 0` names the caller.
    let rc = unsafe { libc::setpriority(libc::PRIO_PROCESS, 0, 10) };
    if rc != 0 {
        warn!(
            "worker {worker}: could not lower priority: {}",
            std::io::Error::last_os_error()
        );
    } else {
        debug!("worker {worker}: priority lowered");
    }
}

#[cfg(not(unix))]
fn lower_thread_priority(worker: usize) {
    warn!("worker {worker}: priority lowering unsupported on this platform");
}

/// Makespan of greedy list scheduling: each task, in `order`, goes to the
/// worker that becomes free first. Models the claim loop with known costs.
pub fn list_schedule_makespan(costs: &[f64], order: &[usize], workers: usize) -> f64 {
    let mut free_at = vec![0.0f64; workers.max(1)];
    for &task in order {
        let w = (0..free_at.len())
            .min_by(|&a, &b| free_at[a].partial_cmp(&free_at[b]).unwrap())
            .unwrap();
        free_at[w] += costs[task];
    }
    free_at.into_iter().fold(0.0, f64::max)
}

/// Makespan when task indices are split into `workers` contiguous blocks of
/// `ceil(n / workers)` tasks, the static split of a plain parallel loop.
pub fn contiguous_makespan(costs: &[f64], workers: usize) -> f64 {
    if costs.is_empty() {
        return 0.0;
    }
    let block = costs.len().div_ceil(workers.max(1));
    costs
        .chunks(block)
        .map(|c| c.iter().sum::<f64>())
        .fold(0.0, f64::max)
}
