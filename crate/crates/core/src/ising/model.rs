use std::collections::HashSet;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub strength: f32,
}

/// Spin-glass Hamiltonian `E = -sum J_ij s_i s_j - sum h_i s_i`.
///
/// Couplings and fields are single precision; total energies are summed in
/// double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    fields: Vec<f32>,
    couplings: Vec<Coupling>,
    // CSR adjacency: neighbours of `s` are `adjacency[offsets[s]..offsets[s + 1]]`
    offsets: Vec<usize>,
    adjacency: Vec<(u32, f32)>,
}

impl IsingModel {
    pub fn new(fields: Vec<f32>, couplings: Vec<Coupling>) -> Result<Self> {
        let num_sites = fields.len();
        if num_sites > u32::MAX as usize {
            return Err(Error::InvalidArgument("too many sites".into()));
        }
        let mut seen = HashSet::with_capacity(couplings.len());
        let mut degree = vec![0usize; num_sites];
        for c in &couplings {
            for site in [c.i, c.j] {
                if site >= num_sites {
                    return Err(Error::SiteOutOfRange { site, num_sites });
                }
            }
            if c.i == c.j {
                return Err(Error::InvalidArgument(format!(
                    "self coupling on site {}",
                    c.i
                )));
            }
            if !seen.insert((c.i.min(c.j), c.i.max(c.j))) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate coupling between {} and {}",
                    c.i, c.j
                )));
            }
            degree[c.i] += 1;
            degree[c.j] += 1;
        }

        let mut offsets = Vec::with_capacity(num_sites + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..num_sites].to_vec();
        let mut adjacency = vec![(0u32, 0f32); offsets[num_sites]];
        for c in &couplings {
            adjacency[cursor[c.i]] = (c.j as u32, c.strength);
            cursor[c.i] += 1;
            adjacency[cursor[c.j]] = (c.i as u32, c.strength);
            cursor[c.j] += 1;
        }

        Ok(IsingModel {
            fields,
            couplings,
            offsets,
            adjacency,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[f32] {
        &self.fields
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn neighbors(&self, site: usize) -> &[(u32, f32)] {
        &self.adjacency[self.offsets[site]..self.offsets[site + 1]]
    }

    pub fn energy(&self, state: &SpinState) -> Result<f64> {
        self.check_size(state)?;
        Ok(self.energy_of(state.spins()))
    }

    pub(crate) fn energy_of(&self, spins: &[i8]) -> f64 {
        let mut e = 0.0f64;
        for c in &self.couplings {
            e -= c.strength as f64 * (spins[c.i] as f64) * (spins[c.j] as f64);
        }
        for (h, &s) in self.fields.iter().zip(spins) {
            e -= *h as f64 * s as f64;
        }
        e
    }

    /// Energy change from flipping `site`.
    pub fn delta_energy(&self, state: &SpinState, site: usize) -> Result<f32> {
        self.check_size(state)?;
        if site >= self.num_sites() {
            return Err(Error::SiteOutOfRange {
                site,
                num_sites: self.num_sites(),
            });
        }
        let spins = state.spins();
        Ok(self.local_delta(site, spins[site], |n| spins[n]))
    }

    /// `2 s (h + sum_n J s_n)` with neighbour spins read through `spin_at`.
    #[inline(always)]
    pub(crate) fn local_delta<F: Fn(usize) -> i8>(&self, site: usize, own: i8, spin_at: F) -> f32 {
        let mut field = self.fields[site];
        for &(n, j) in self.neighbors(site) {
            field += j * spin_at(n as usize) as f32;
        }
        2.0 * own as f32 * field
    }

    /// SHA-256 over a canonical little-endian encoding of fields and couplings.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(b"ising-model-v1");
        hasher.update((self.num_sites() as u64).to_le_bytes());
        for h in &self.fields {
            hasher.update(h.to_bits().to_le_bytes());
        }
        hasher.update((self.couplings.len() as u64).to_le_bytes());
        for c in &self.couplings {
            hasher.update((c.i as u64).to_le_bytes());
            hasher.update((c.j as u64).to_le_bytes());
            hasher.update(c.strength.to_bits().to_le_bytes());
        }
        hasher.finalize().into()
    }

    fn check_size(&self, state: &SpinState) -> Result<()> {
        if state.len() != self.num_sites() {
            return Err(Error::SizeMismatch {
                expected: self.num_sites(),
                actual: state.len(),
            });
        }
        Ok(())
    }
}

/// Spin configuration with values in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinState {
    spins: Vec<i8>,
}

impl SpinState {
    pub fn all_up(num_sites: usize) -> Self {
        SpinState {
            spins: vec![1; num_sites],
        }
    }

    /// One draw per site; spin is +1 when the draw's top bit is clear.
    pub fn random(num_sites: usize, rng: &mut RngStream) -> Self {
        let spins = (0..num_sites)
            .map(|_| if rng.next_u32() >> 31 == 0 { 1 } else { -1 })
            .collect();
        SpinState { spins }
    }

    pub fn from_spins(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!(
                "spin {pos} has value {}, expected -1 or +1",
                spins[pos]
            )));
        }
        Ok(SpinState { spins })
    }

    /// Bit `k` of `code` set means site `k` is -1.
    pub fn from_code(num_sites: usize, code: u64) -> Self {
        let spins = (0..num_sites)
            .map(|k| if code >> k & 1 == 1 { -1 } else { 1 })
            .collect();
        SpinState { spins }
    }

    /// Inverse of [`SpinState::from_code`]; only meaningful for up to 64 sites.
    pub fn code(&self) -> u64 {
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == -1)
            .fold(0u64, |acc, (k, _)| acc | 1 << k)
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub(crate) fn spins_mut(&mut self) -> &mut [i8] {
        &mut self.spins
    }

    pub fn flip(&mut self, site: usize) {
        self.spins[site] = -self.spins[site];
    }
}
