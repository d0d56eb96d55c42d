//! Metropolis sweeps over a whole chain or over region groups.

use std::sync::atomic::{AtomicI8, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::ising::{verify_partition, Group, IsingModel, RegionPartition};
use crate::parallel::{Executor, WorkPool};
use crate::ptmc::chain::{Chain, ChainStreams};
use crate::rng::RngStream;

trait Spins {
    fn get(&self, site: usize) -> i8;
    fn set(&mut self, site: usize, value: i8);
}

impl Spins for [i8] {
    #[inline(always)]
    fn get(&self, site: usize) -> i8 {
        self[site]
    }

    #[inline(always)]
    fn set(&mut self, site: usize, value: i8) {
        self[site] = value;
    }
}

/// Spins of one chain shared by the region tasks of a group.
#[derive(Clone, Copy)]
struct SharedSpins<'a>(&'a [AtomicI8]);

impl<'a> SharedSpins<'a> {
    fn new(spins: &'a mut [i8]) -> Self {
        // SAFETY: AtomicI8 has the size and alignment of i8, and the
        // exclusive borrow rules out non-atomic access while this view lives.
        SharedSpins(unsafe { &*(spins as *mut [i8] as *const [AtomicI8]) })
    }
}

impl Spins for SharedSpins<'_> {
    #[inline(always)]
    fn get(&self, site: usize) -> i8 {
        self.0[site].load(Ordering::Relaxed)
    }

    #[inline(always)]
    fn set(&mut self, site: usize, value: i8) {
        self.0[site].store(value, Ordering::Relaxed);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    attempted: u64,
    accepted: u64,
    delta: f64,
}

/// Metropolis acceptance of a flip with energy change `delta` against the
/// uniform draw `u`.
#[inline(always)]
pub fn metropolis_accepts(beta: f64, delta: f32, u: f32) -> bool {
    delta <= 0.0 || (u as f64) < (-beta * delta as f64).exp()
}

#[inline]
fn metropolis_sites<S, I>(
    model: &IsingModel,
    beta: f64,
    spins: &mut S,
    sites: I,
    rng: &mut RngStream,
) -> Tally
where
    S: Spins + ?Sized,
    I: IntoIterator<Item = usize>,
{
    let mut tally = Tally::default();
    for site in sites {
        let own = spins.get(site);
        let delta = model.local_delta(site, own, |n| spins.get(n));
        let u = rng.next_unit_f32();
        tally.attempted += 1;
        if metropolis_accepts(beta, delta, u) {
            spins.set(site, -own);
            tally.accepted += 1;
            tally.delta += delta as f64;
        }
    }
    tally
}

fn apply(chain: &mut Chain, tally: Tally) {
    chain.energy += tally.delta;
    chain.stats.attempted_flips += tally.attempted;
    chain.stats.accepted_flips += tally.accepted;
}

/// One pass over every site in ascending order, one draw per site.
pub fn sweep(chain: &mut Chain, model: &IsingModel) -> Result<()> {
    check_size(chain, model)?;
    let Chain {
        state,
        beta,
        streams,
        ..
    } = chain;
    let ChainStreams::Coarse(rng) = streams else {
        return Err(Error::InvalidArgument(
            "whole-chain sweep needs a coarse-mode chain".into(),
        ));
    };
    let tally = metropolis_sites(model, *beta, state.spins_mut(), 0..model.num_sites(), rng);
    apply(chain, tally);
    chain.stats.sweeps += 1;
    Ok(())
}

/// Serial reference for [`sweep_regional`]: group-A regions in index order,
/// then group-B regions in index order, each with its own stream.
pub fn sweep_regional_serial(
    chain: &mut Chain,
    model: &IsingModel,
    partition: &RegionPartition,
) -> Result<()> {
    check_regional(chain, model, partition)?;
    let Chain {
        state,
        beta,
        streams,
        ..
    } = chain;
    let ChainStreams::Regional(rngs) = streams else {
        unreachable!("checked above")
    };
    let mut total = Tally::default();
    for group in [Group::A, Group::B] {
        for r in partition.regions_in(group) {
            let t = metropolis_sites(
                model,
                *beta,
                state.spins_mut(),
                partition.region(r).iter().copied(),
                &mut rngs[r],
            );
            total.attempted += t.attempted;
            total.accepted += t.accepted;
            total.delta += t.delta;
        }
    }
    apply(chain, total);
    chain.stats.sweeps += 1;
    Ok(())
}

/// One sweep of `chain` with the regions of each group spread over the
/// executor's workers and a barrier between the groups.
pub fn sweep_regional(
    chain: &mut Chain,
    model: &IsingModel,
    partition: &RegionPartition,
    executor: &Executor,
) -> Result<()> {
    verify_partition(model, partition).map_err(|v| Error::InvalidPartition(v.to_string()))?;
    regional_sweeps(std::slice::from_mut(chain), model, partition, executor, 1)
}

struct RegionTask<'a> {
    spins: SharedSpins<'a>,
    rng: &'a mut RngStream,
    sites: &'a [usize],
    beta: f64,
    tally: Tally,
}

/// `sweeps` regional sweeps of every chain. Tasks are (chain, region) pairs;
/// all group-A tasks of all chains run between two barriers, then all
/// group-B tasks. The partition must already be verified.
pub(crate) fn regional_sweeps(
    chains: &mut [Chain],
    model: &IsingModel,
    partition: &RegionPartition,
    executor: &Executor,
    sweeps: u64,
) -> Result<()> {
    for chain in chains.iter() {
        check_regional(chain, model, partition)?;
    }
    let regions = partition.num_regions();

    let mut tallies = vec![Tally::default(); chains.len() * regions];
    {
        let mut group_a = Vec::new();
        let mut group_b = Vec::new();
        for (c, chain) in chains.iter_mut().enumerate() {
            let Chain {
                state,
                beta,
                streams,
                ..
            } = chain;
            let ChainStreams::Regional(rngs) = streams else {
                unreachable!("checked above")
            };
            let spins = SharedSpins::new(state.spins_mut());
            for (r, rng) in rngs.iter_mut().enumerate() {
                let task = RegionTask {
                    spins,
                    rng,
                    sites: partition.region(r),
                    beta: *beta,
                    tally: Tally::default(),
                };
                match partition.group(r) {
                    Group::A => group_a.push((c * regions + r, Mutex::new(task))),
                    Group::B => group_b.push((c * regions + r, Mutex::new(task))),
                }
            }
        }

        let pool_a = WorkPool::sequential(group_a.len());
        let pool_b = WorkPool::sequential(group_b.len());
        let run_group = |tasks: &[(usize, Mutex<RegionTask>)], pool: &WorkPool| {
            executor.run_phase(pool, |k| {
                let mut guard = tasks[k].1.lock().unwrap();
                let task = &mut *guard;
                let t = metropolis_sites(
                    model,
                    task.beta,
                    &mut task.spins,
                    task.sites.iter().copied(),
                    task.rng,
                );
                task.tally.attempted += t.attempted;
                task.tally.accepted += t.accepted;
                task.tally.delta += t.delta;
                Ok(())
            })
        };
        for _ in 0..sweeps {
            run_group(&group_a, &pool_a)?;
            run_group(&group_b, &pool_b)?;
        }
        for (slot, task) in group_a.into_iter().chain(group_b) {
            tallies[slot] = task.into_inner().unwrap().tally;
        }
    }

    for (chain, per_region) in chains.iter_mut().zip(tallies.chunks(regions.max(1))) {
        for t in per_region {
            apply(chain, *t);
        }
        chain.stats.sweeps += sweeps;
    }
    Ok(())
}

fn check_size(chain: &Chain, model: &IsingModel) -> Result<()> {
    if chain.state.len() != model.num_sites() {
        return Err(Error::SizeMismatch {
            expected: model.num_sites(),
            actual: chain.state.len(),
        });
    }
    Ok(())
}

fn check_regional(chain: &Chain, model: &IsingModel, partition: &RegionPartition) -> Result<()> {
    check_size(chain, model)?;
    match &chain.streams {
        ChainStreams::Regional(rngs) if rngs.len() == partition.num_regions() => Ok(()),
        ChainStreams::Regional(rngs) => Err(Error::InvalidArgument(format!(
            "chain has {} region streams, partition has {} regions",
            rngs.len(),
            partition.num_regions()
        ))),
        ChainStreams::Coarse(_) => Err(Error::InvalidArgument(
            "regional sweep needs a regional-mode chain".into(),
        )),
    }
}
