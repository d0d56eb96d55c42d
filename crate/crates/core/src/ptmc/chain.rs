use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ising::{IsingModel, RegionPartition, SpinState};
use crate::rng::{coarse_seed, regional_seed, RngStream};

/// How a chain's sweep is split across execution units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One worker sweeps the whole chain with the chain's single stream.
    Coarse,
    /// Regions of one group are swept concurrently, each with its own stream.
    Regional,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coarse" => Ok(Mode::Coarse),
            "regional" => Ok(Mode::Regional),
            other => Err(Error::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Coarse => "coarse",
            Mode::Regional => "regional",
        })
    }
}

/// Random streams owned by one temperature slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainStreams {
    Coarse(RngStream),
    /// One stream per region, indexed like the partition's regions.
    Regional(Vec<RngStream>),
}

impl ChainStreams {
    pub fn mode(&self) -> Mode {
        match self {
            ChainStreams::Coarse(_) => Mode::Coarse,
            ChainStreams::Regional(_) => Mode::Regional,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChainStats {
    pub sweeps: u64,
    pub attempted_flips: u64,
    pub accepted_flips: u64,
    pub measurements: u64,
    pub energy_sum: f64,
    pub energy_sq_sum: f64,
}

impl ChainStats {
    pub fn flip_rate(&self) -> f64 {
        ratio(self.accepted_flips, self.attempted_flips)
    }

    pub fn mean_energy(&self) -> f64 {
        if self.measurements == 0 {
            return 0.0;
        }
        self.energy_sum / self.measurements as f64
    }

    pub fn energy_variance(&self) -> f64 {
        if self.measurements == 0 {
            return 0.0;
        }
        let mean = self.mean_energy();
        (self.energy_sq_sum / self.measurements as f64 - mean * mean).max(0.0)
    }
}

pub(crate) fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// One temperature slot of the ensemble.
///
/// Temperature, streams and statistics belong to the slot; the spin state
/// and its cached energy move between slots when a swap is accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub(crate) state: SpinState,
    pub(crate) beta: f64,
    pub(crate) energy: f64,
    pub(crate) streams: ChainStreams,
    pub(crate) stats: ChainStats,
}

impl Chain {
    pub fn with_state(
        model: &IsingModel,
        state: SpinState,
        beta: f64,
        streams: ChainStreams,
    ) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidArgument(format!("invalid beta {beta}")));
        }
        let energy = model.energy(&state)?;
        Ok(Chain {
            state,
            beta,
            energy,
            streams,
            stats: ChainStats::default(),
        })
    }

    /// Chain `index` of a coarse-mode ensemble; the initial state takes one
    /// draw per site from the chain's own stream.
    pub fn coarse(model: &IsingModel, beta: f64, start_seed: u32, index: usize) -> Result<Self> {
        let mut rng = RngStream::new(coarse_seed(start_seed, index));
        let state = SpinState::random(model.num_sites(), &mut rng);
        Chain::with_state(model, state, beta, ChainStreams::Coarse(rng))
    }

    /// Chain `index` of a regional-mode ensemble; each region's initial spins
    /// come from that region's stream.
    pub fn regional(
        model: &IsingModel,
        partition: &RegionPartition,
        beta: f64,
        start_seed: u32,
        index: usize,
    ) -> Result<Self> {
        let regions = partition.num_regions();
        let mut rngs = (0..regions)
            .map(|r| regional_seed(start_seed, index, regions, r).map(RngStream::new))
            .collect::<Result<Vec<_>>>()?;
        let mut spins = vec![1i8; model.num_sites()];
        for (r, rng) in rngs.iter_mut().enumerate() {
            for &site in partition.region(r) {
                let s = spins.get_mut(site).ok_or(Error::SiteOutOfRange {
                    site,
                    num_sites: model.num_sites(),
                })?;
                *s = if rng.next_u32() >> 31 == 0 { 1 } else { -1 };
            }
        }
        let state = SpinState::from_spins(spins)?;
        Chain::with_state(model, state, beta, ChainStreams::Regional(rngs))
    }

    pub fn state(&self) -> &SpinState {
        &self.state
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }

    /// Cached energy of the current state.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn streams(&self) -> &ChainStreams {
        &self.streams
    }

    pub fn stats(&self) -> &ChainStats {
        &self.stats
    }

    /// Replaces the cached energy with an exact double-precision evaluation.
    pub fn refresh_energy(&mut self, model: &IsingModel) {
        self.energy = model.energy_of(self.state.spins());
    }
}
