use crate::error::{Error, Result};
use crate::ising::{verify_partition, IsingModel, RegionPartition};
use crate::ptmc::chain::{ratio, Chain, Mode};
use crate::rng::{coarse_seed, regional_seed, RngStream};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SwapStats {
    pub attempted: u64,
    pub accepted: u64,
}

impl SwapStats {
    pub fn rate(&self) -> f64 {
        ratio(self.accepted, self.attempted)
    }
}

/// Chains ordered hottest first, plus the swap stream and schedule counters.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub(crate) chains: Vec<Chain>,
    pub(crate) swap_rng: RngStream,
    pub(crate) mode: Mode,
    pub(crate) swap_parity: u8,
    pub(crate) sweeps_per_swap: u64,
    pub(crate) sweep_counter: u64,
    pub(crate) swap_counter: u64,
    /// Entry `k` counts attempts between chains `k` and `k + 1`.
    pub(crate) swap_stats: Vec<SwapStats>,
}

/// Acceptance probability for exchanging the states of two chains,
/// `min(1, exp((beta_a - beta_b) * (e_a - e_b)))`.
pub fn swap_acceptance(beta_a: f64, beta_b: f64, energy_a: f64, energy_b: f64) -> f64 {
    ((beta_a - beta_b) * (energy_a - energy_b)).exp().min(1.0)
}

/// Draws one uniform from `swap_rng` and, on acceptance, exchanges the spin
/// states and cached energies. Temperatures, streams and statistics stay.
pub fn attempt_swap(lower: &mut Chain, upper: &mut Chain, swap_rng: &mut RngStream) -> bool {
    let u = swap_rng.next_unit_f32();
    resolve_swap(lower, upper, u)
}

fn resolve_swap(lower: &mut Chain, upper: &mut Chain, u: f32) -> bool {
    let p = swap_acceptance(lower.beta, upper.beta, lower.energy, upper.energy);
    let accept = (u as f64) < p;
    if accept {
        std::mem::swap(&mut lower.state, &mut upper.state);
        std::mem::swap(&mut lower.energy, &mut upper.energy);
    }
    accept
}

impl Ensemble {
    /// Builds an ensemble for `temperatures` (strictly decreasing, hottest
    /// first). All seeds derive from `start_seed`; the swap stream takes the
    /// first seed no chain uses.
    pub fn new(
        model: &IsingModel,
        temperatures: &[f64],
        start_seed: u32,
        sweeps_per_swap: u64,
        mode: Mode,
        partition: Option<&RegionPartition>,
    ) -> Result<Self> {
        validate_ladder(temperatures)?;
        if sweeps_per_swap == 0 {
            return Err(Error::InvalidArgument(
                "sweeps_per_swap must be positive".into(),
            ));
        }
        let n = temperatures.len();
        let (chains, swap_seed) = match mode {
            Mode::Coarse => {
                let chains = temperatures
                    .iter()
                    .enumerate()
                    .map(|(c, t)| Chain::coarse(model, 1.0 / t, start_seed, c))
                    .collect::<Result<Vec<_>>>()?;
                (chains, coarse_seed(start_seed, n))
            }
            Mode::Regional => {
                let partition = partition.ok_or_else(|| {
                    Error::InvalidArgument("regional mode needs a region partition".into())
                })?;
                verify_partition(model, partition)
                    .map_err(|v| Error::InvalidPartition(v.to_string()))?;
                let regions = partition.num_regions();
                let chains = temperatures
                    .iter()
                    .enumerate()
                    .map(|(c, t)| Chain::regional(model, partition, 1.0 / t, start_seed, c))
                    .collect::<Result<Vec<_>>>()?;
                (chains, regional_seed(start_seed, n, regions, 0)?)
            }
        };
        Ok(Ensemble {
            chains,
            swap_rng: RngStream::new(swap_seed),
            mode,
            swap_parity: 0,
            sweeps_per_swap,
            sweep_counter: 0,
            swap_counter: 0,
            swap_stats: vec![SwapStats::default(); n.saturating_sub(1)],
        })
    }

    /// Assembles an ensemble from prepared chains, e.g. for synthetic tests.
    pub fn from_chains(
        chains: Vec<Chain>,
        swap_rng: RngStream,
        sweeps_per_swap: u64,
    ) -> Result<Self> {
        let Some(first) = chains.first() else {
            return Err(Error::InvalidArgument(
                "ensemble needs at least one chain".into(),
            ));
        };
        let mode = first.streams.mode();
        if chains.iter().any(|c| c.streams.mode() != mode) {
            return Err(Error::InvalidArgument(
                "chains mix coarse and regional streams".into(),
            ));
        }
        let temps: Vec<f64> = chains.iter().map(Chain::temperature).collect();
        validate_ladder(&temps)?;
        if sweeps_per_swap == 0 {
            return Err(Error::InvalidArgument(
                "sweeps_per_swap must be positive".into(),
            ));
        }
        let n = chains.len();
        Ok(Ensemble {
            chains,
            swap_rng,
            mode,
            swap_parity: 0,
            sweeps_per_swap,
            sweep_counter: 0,
            swap_counter: 0,
            swap_stats: vec![SwapStats::default(); n - 1],
        })
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.chains.iter().map(Chain::temperature).collect()
    }

    pub fn swap_rng(&self) -> &RngStream {
        &self.swap_rng
    }

    pub fn swap_parity(&self) -> u8 {
        self.swap_parity
    }

    pub fn sweeps_per_swap(&self) -> u64 {
        self.sweeps_per_swap
    }

    /// Sweeps received by every chain so far.
    pub fn sweep_counter(&self) -> u64 {
        self.sweep_counter
    }

    pub fn swap_counter(&self) -> u64 {
        self.swap_counter
    }

    pub fn swap_stats(&self) -> &[SwapStats] {
        &self.swap_stats
    }

    /// Adjacent pairs `(k, k + 1)` attempted by the next swap phase.
    pub fn next_swap_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.chains.len();
        (self.swap_parity as usize..n.saturating_sub(1))
            .step_by(2)
            .map(|k| (k, k + 1))
            .collect()
    }

    /// Attempts every disjoint pair starting at the current parity offset.
    /// Uniforms are drawn in ascending pair order before any pair is
    /// resolved; the parity flips afterwards.
    pub fn swap_phase(&mut self) -> usize {
        let pairs = self.next_swap_pairs();
        let draws: Vec<f32> = pairs
            .iter()
            .map(|_| self.swap_rng.next_unit_f32())
            .collect();
        let mut accepted = 0;
        for (&(k, _), u) in pairs.iter().zip(draws) {
            let (head, tail) = self.chains.split_at_mut(k + 1);
            let ok = resolve_swap(&mut head[k], &mut tail[0], u);
            self.swap_stats[k].attempted += 1;
            if ok {
                self.swap_stats[k].accepted += 1;
                accepted += 1;
            }
        }
        self.swap_parity ^= 1;
        self.swap_counter += 1;
        accepted
    }

    /// Adds every chain's current energy to its slot's accumulators.
    pub fn record_measurements(&mut self) {
        for chain in &mut self.chains {
            chain.stats.measurements += 1;
            chain.stats.energy_sum += chain.energy;
            chain.stats.energy_sq_sum += chain.energy * chain.energy;
        }
    }
}

/// Temperatures must be positive, finite and strictly decreasing.
pub fn validate_ladder(temperatures: &[f64]) -> Result<()> {
    if temperatures.is_empty() {
        return Err(Error::InvalidArgument("temperature ladder is empty".into()));
    }
    if let Some(t) = temperatures.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::InvalidArgument(format!("invalid temperature {t}")));
    }
    if let Some(w) = temperatures.windows(2).find(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "temperatures must strictly decrease: {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `n` temperatures from `t_max` down to `t_min`, evenly spaced in log.
pub fn geometric_ladder(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "ladder needs at least one temperature".into(),
        ));
    }
    if !(t_min > 0.0 && t_min.is_finite() && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "invalid range [{t_min}, {t_max}]"
        )));
    }
    if n == 1 {
        return Ok(vec![t_min]);
    }
    if t_max <= t_min {
        return Err(Error::InvalidArgument(format!(
            "t_max {t_max} must exceed t_min {t_min}"
        )));
    }
    let ratio = t_min / t_max;
    let mut ladder: Vec<f64> = (0..n)
        .map(|k| t_max * ratio.powf(k as f64 / (n - 1) as f64))
        .collect();
    ladder[n - 1] = t_min;
    validate_ladder(&ladder)?;
    Ok(ladder)
}

pub fn parse_ladder(text: &str) -> Result<Vec<f64>> {
    let mut temps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t: f64 = line.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            message: format!("invalid temperature '{line}'"),
        })?;
        temps.push(t);
    }
    validate_ladder(&temps)?;
    Ok(temps)
}

pub fn format_ladder(temperatures: &[f64]) -> String {
    temperatures.iter().map(|t| format!("{t}\n")).collect()
}
