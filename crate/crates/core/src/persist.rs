//! Bit-exact checkpoints of a whole ensemble.
//!
//! A checkpoint is little-endian fixed-width binary:
//!
//! | field            | size                                  |
//! |------------------|---------------------------------------|
//! | magic            | 8 bytes, `PTMCCKPT`                   |
//! | version          | u32                                   |
//! | model fingerprint| 32 bytes (SHA-256)                    |
//! | total sweeps     | u64                                   |
//! | payload length   | u64                                   |
//! | payload          | serialized [`Ensemble`]               |
//! | checksum         | 32 bytes, SHA-256 of everything above |
//!
//! The payload layout is given by [`encode_ensemble`]; see
//! `docs/checkpoint-format.md` for the field-by-field description.

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinState};
use crate::ptmc::{Chain, ChainStats, ChainStreams, Ensemble, Mode, SwapStats};
use crate::rng::{RngStream, STREAM_BYTES};

pub const MAGIC: &[u8; 8] = b"PTMCCKPT";
pub const VERSION: u32 = 1;
const HEADER_BYTES: usize = 8 + 4 + 32 + 8 + 8;
const CHECKSUM_BYTES: usize = 32;

/// A decoded checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub ensemble: Ensemble,
    /// Sweep target of the interrupted run.
    pub total_sweeps: u64,
}

/// Serializes every bit of run state: spins, cached energies, all stream
/// words and indices, counters, parity and statistics.
pub fn encode_ensemble(ensemble: &Ensemble) -> Vec<u8> {
    let n = ensemble.chains.len();
    let sites = ensemble.chains.first().map_or(0, |c| c.state.len());
    let mut out = Vec::with_capacity(64 + n * (sites + STREAM_BYTES + 96));
    put_u32(&mut out, n as u32);
    put_u32(&mut out, sites as u32);
    out.push(match ensemble.mode {
        Mode::Coarse => 0,
        Mode::Regional => 1,
    });
    out.push(ensemble.swap_parity);
    put_u64(&mut out, ensemble.sweeps_per_swap);
    put_u64(&mut out, ensemble.sweep_counter);
    put_u64(&mut out, ensemble.swap_counter);
    for chain in &ensemble.chains {
        put_f64(&mut out, chain.beta);
        put_f64(&mut out, chain.energy);
        out.extend(chain.state.spins().iter().map(|&s| s as u8));
        match &chain.streams {
            ChainStreams::Coarse(rng) => {
                put_u32(&mut out, 0);
                rng.write_bytes(&mut out);
            }
            ChainStreams::Regional(rngs) => {
                put_u32(&mut out, rngs.len() as u32);
                for rng in rngs {
                    rng.write_bytes(&mut out);
                }
            }
        }
        let s = &chain.stats;
        put_u64(&mut out, s.sweeps);
        put_u64(&mut out, s.attempted_flips);
        put_u64(&mut out, s.accepted_flips);
        put_u64(&mut out, s.measurements);
        put_f64(&mut out, s.energy_sum);
        put_f64(&mut out, s.energy_sq_sum);
    }
    ensemble.swap_rng.write_bytes(&mut out);
    for s in &ensemble.swap_stats {
        put_u64(&mut out, s.attempted);
        put_u64(&mut out, s.accepted);
    }
    out
}

/// Inverse of [`encode_ensemble`]; rejects trailing or missing bytes.
pub fn decode_ensemble(bytes: &[u8]) -> Result<Ensemble> {
    let mut r = Reader::new(bytes);
    let n = r.u32()? as usize;
    let sites = r.u32()? as usize;
    if n == 0 {
        return Err(Error::Format("ensemble has no chains".into()));
    }
    let mode = match r.u8()? {
        0 => Mode::Coarse,
        1 => Mode::Regional,
        m => return Err(Error::Format(format!("unknown mode tag {m}"))),
    };
    let swap_parity = r.u8()?;
    if swap_parity > 1 {
        return Err(Error::Format(format!("swap parity {swap_parity}")));
    }
    let sweeps_per_swap = r.u64()?;
    let sweep_counter = r.u64()?;
    let swap_counter = r.u64()?;

    let mut chains = Vec::with_capacity(n);
    for _ in 0..n {
        let beta = r.f64()?;
        let energy = r.f64()?;
        let spins = r.take(sites)?.iter().map(|&b| b as i8).collect();
        let state = SpinState::from_spins(spins)?;
        let regions = r.u32()? as usize;
        let streams = match (mode, regions) {
            (Mode::Coarse, 0) => ChainStreams::Coarse(r.stream()?),
            (Mode::Regional, k) if k > 0 => {
                ChainStreams::Regional((0..k).map(|_| r.stream()).collect::<Result<_>>()?)
            }
            _ => {
                return Err(Error::Format(format!(
                    "{regions} region streams in {mode} mode"
                )))
            }
        };
        let stats = ChainStats {
            sweeps: r.u64()?,
            attempted_flips: r.u64()?,
            accepted_flips: r.u64()?,
            measurements: r.u64()?,
            energy_sum: r.f64()?,
            energy_sq_sum: r.f64()?,
        };
        chains.push(Chain {
            state,
            beta,
            energy,
            streams,
            stats,
        });
    }
    let swap_rng = r.stream()?;
    let swap_stats = (0..n - 1)
        .map(|_| {
            Ok(SwapStats {
                attempted: r.u64()?,
                accepted: r.u64()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if !r.rest().is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", r.rest().len())));
    }
    Ok(Ensemble {
        chains,
        swap_rng,
        mode,
        swap_parity,
        sweeps_per_swap,
        sweep_counter,
        swap_counter,
        swap_stats,
    })
}

impl Ensemble {
    pub fn to_bytes(&self) -> Vec<u8> {
        encode_ensemble(self)
    }
}

pub fn checkpoint_bytes(ensemble: &Ensemble, model: &IsingModel, total_sweeps: u64) -> Vec<u8> {
    let payload = encode_ensemble(ensemble);
    let mut out = Vec::with_capacity(HEADER_BYTES + payload.len() + CHECKSUM_BYTES);
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, VERSION);
    out.extend_from_slice(&model.fingerprint());
    put_u64(&mut out, total_sweeps);
    put_u64(&mut out, payload.len() as u64);
    out.extend_from_slice(&payload);
    let checksum: [u8; 32] = Sha256::digest(&out).into();
    out.extend_from_slice(&checksum);
    out
}

pub fn parse_checkpoint(bytes: &[u8], model: &IsingModel) -> Result<Checkpoint> {
    if bytes.len() < HEADER_BYTES + CHECKSUM_BYTES || &bytes[..8] != MAGIC {
        return Err(Error::Format("not a checkpoint file or truncated".into()));
    }
    let (body, checksum) = bytes.split_at(bytes.len() - CHECKSUM_BYTES);
    if Sha256::digest(body).as_slice() != checksum {
        return Err(Error::Checksum);
    }
    let mut r = Reader::new(&body[8..]);
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Version {
            found: version,
            expected: VERSION,
        });
    }
    if r.take(32)? != model.fingerprint() {
        return Err(Error::FingerprintMismatch);
    }
    let total_sweeps = r.u64()?;
    let len = r.u64()? as usize;
    let payload = r.take(len)?;
    if !r.rest().is_empty() {
        return Err(Error::Format("unexpected bytes after payload".into()));
    }
    let ensemble = decode_ensemble(payload)?;
    if ensemble.chains[0].state.len() != model.num_sites() {
        return Err(Error::SizeMismatch {
            expected: model.num_sites(),
            actual: ensemble.chains[0].state.len(),
        });
    }
    Ok(Checkpoint {
        ensemble,
        total_sweeps,
    })
}

/// Writes to a sibling temp file, syncs, then renames over `path`, so an
/// earlier checkpoint survives any failure.
pub fn save(ensemble: &Ensemble, model: &IsingModel, total_sweeps: u64, path: &Path) -> Result<()> {
    let bytes = checkpoint_bytes(ensemble, model, total_sweeps);
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn load(path: &Path, model: &IsingModel) -> Result<Checkpoint> {
    parse_checkpoint(&fs::read(path)?, model)
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_bits().to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() < n {
            return Err(Error::Format("truncated ensemble data".into()));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn rest(&self) -> &'a [u8] {
        self.bytes
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn stream(&mut self) -> Result<RngStream> {
        RngStream::from_bytes(self.take(STREAM_BYTES)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{generate_layered, LayeredParams};

    fn setup(mode: Mode) -> (IsingModel, Ensemble) {
        let p = generate_layered(&LayeredParams::new(4, 4), &mut RngStream::new(5)).unwrap();
        let ens =
            Ensemble::new(&p.model, &[3.0, 2.0, 1.0], 17, 2, mode, Some(&p.partition)).unwrap();
        (p.model, ens)
    }

    #[test]
    fn ensemble_round_trip_both_modes() {
        for mode in [Mode::Coarse, Mode::Regional] {
            let (_, ens) = setup(mode);
            let bytes = encode_ensemble(&ens);
            let back = decode_ensemble(&bytes).unwrap();
            assert_eq!(back, ens);
            assert_eq!(encode_ensemble(&back), bytes);
        }
    }

    #[test]
    fn every_truncation_is_rejected() {
        let (model, ens) = setup(Mode::Coarse);
        let bytes = checkpoint_bytes(&ens, &model, 10);
        for cut in (0..bytes.len()).step_by(97).chain([bytes.len() - 1]) {
            assert!(
                parse_checkpoint(&bytes[..cut], &model).is_err(),
                "cut {cut}"
            );
        }
        let payload = encode_ensemble(&ens);
        assert!(decode_ensemble(&payload[..payload.len() - 1]).is_err());
        let mut longer = payload.clone();
        longer.push(0);
        assert!(decode_ensemble(&longer).is_err());
    }

    #[test]
    fn version_and_fingerprint_checks() {
        let (model, ens) = setup(Mode::Coarse);
        let other = generate_layered(&LayeredParams::new(4, 4), &mut RngStream::new(6))
            .unwrap()
            .model;
        let bytes = checkpoint_bytes(&ens, &model, 10);
        assert!(matches!(
            parse_checkpoint(&bytes, &other),
            Err(Error::FingerprintMismatch)
        ));

        // rewrite the version and re-seal the checksum
        let mut body = bytes[..bytes.len() - 32].to_vec();
        body[8..12].copy_from_slice(&2u32.to_le_bytes());
        let sum: [u8; 32] = Sha256::digest(&body).into();
        body.extend_from_slice(&sum);
        assert!(matches!(
            parse_checkpoint(&body, &model),
            Err(Error::Version {
                found: 2,
                expected: 1
            })
        ));
    }
}
