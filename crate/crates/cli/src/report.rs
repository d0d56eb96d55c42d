//! CSV outputs. Every file is written to `<path>.partial` and renamed into
//! place once complete, so a failed command leaves only the `.partial`
//! marker behind.

use std::fs::{self, File};
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use ptmc_core::ptmc::{Ensemble, PhaseObserver};

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// A CSV file that only appears under its final name after [`commit`](Self::commit).
pub struct PendingCsv {
    path: PathBuf,
    partial: PathBuf,
    writer: csv::Writer<File>,
}

impl PendingCsv {
    pub fn create(path: &Path) -> Result<Self> {
        let partial = partial_path(path);
        let writer = csv::Writer::from_path(&partial)
            .with_context(|| format!("creating {}", partial.display()))?;
        Ok(PendingCsv {
            path: path.to_path_buf(),
            partial,
            writer,
        })
    }

    pub fn writer(&mut self) -> &mut csv::Writer<File> {
        &mut self.writer
    }

    pub fn commit(mut self) -> Result<()> {
        self.writer.flush()?;
        fs::rename(&self.partial, &self.path)
            .with_context(|| format!("finalizing {}", self.path.display()))?;
        Ok(())
    }
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut out = PendingCsv::create(path)?;
    for row in rows {
        out.writer().serialize(row)?;
    }
    out.commit()
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = reader.deserialize().collect::<Result<Vec<T>, _>>()?;
    Ok(rows)
}

/// Text file written through the same partial-then-rename protocol.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let partial = partial_path(path);
    fs::write(&partial, text).with_context(|| format!("writing {}", partial.display()))?;
    fs::rename(&partial, path).with_context(|| format!("finalizing {}", path.display()))?;
    Ok(())
}

/// Per-run timing row, or the aggregate (`label == "aggregate"`) with
/// mean and sample standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub pt_time_s: f64,
    pub pt_std_s: f64,
    pub total_time_s: f64,
    pub total_std_s: f64,
    pub phases: u64,
    pub sweeps: u64,
}

/// Final per-chain (`kind == "chain"`) or per-pair (`kind == "pair"`) statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub kind: String,
    pub index: usize,
    pub temperature: f64,
    pub mean_energy: f64,
    pub energy_std: f64,
    pub flip_rate: f64,
    pub swap_rate: f64,
}

pub fn stats_rows(ensemble: &Ensemble) -> Vec<StatsRow> {
    let chains = ensemble.chains().iter().enumerate().map(|(k, c)| StatsRow {
        kind: "chain".into(),
        index: k,
        temperature: c.temperature(),
        mean_energy: c.stats().mean_energy(),
        energy_std: c.stats().energy_variance().sqrt(),
        flip_rate: c.stats().flip_rate(),
        swap_rate: 0.0,
    });
    let temps = ensemble.temperatures();
    let pairs = ensemble
        .swap_stats()
        .iter()
        .enumerate()
        .map(|(k, s)| StatsRow {
            kind: "pair".into(),
            index: k,
            temperature: temps[k],
            mean_energy: 0.0,
            energy_std: 0.0,
            flip_rate: 0.0,
            swap_rate: s.rate(),
        });
    chains.chain(pairs).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub workers: usize,
    pub pt_time_s: f64,
    pub pt_std_s: f64,
    pub total_time_s: f64,
    pub total_std_s: f64,
    pub speedup: f64,
    pub linear: f64,
    /// Final ensemble identical to the single-worker run.
    pub stats_match: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputRow {
    pub qubits: usize,
    pub copies: usize,
    pub chains: usize,
    pub variables: u64,
    pub pt_time_s: f64,
    pub variables_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub qubits: usize,
    pub copies: usize,
    pub chains: usize,
    pub total_variables: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingRow {
    pub chains: usize,
    pub processors: usize,
    pub block_size: usize,
    pub registers: usize,
    pub packed_chains: usize,
    pub num_blocks: usize,
    pub threads_per_block: usize,
    pub parallel_chains: usize,
}

/// One row per swap phase: sweep counter, every chain's energy, its flip
/// rate over the phase just finished, and every pair's cumulative swap rate.
pub struct PhaseCsv {
    out: PendingCsv,
    phase: u64,
    last_flips: Vec<(u64, u64)>,
}

impl PhaseCsv {
    pub fn create(path: &Path, ensemble: &Ensemble) -> Result<Self> {
        let mut out = PendingCsv::create(path)?;
        let n = ensemble.len();
        let mut header = vec!["phase".to_string(), "sweep".to_string()];
        header.extend((0..n).map(|k| format!("energy_{k}")));
        header.extend((0..n).map(|k| format!("flip_rate_{k}")));
        header.extend((0..n.saturating_sub(1)).map(|k| format!("swap_rate_{k}")));
        out.writer().write_record(&header)?;
        let last_flips = ensemble
            .chains()
            .iter()
            .map(|c| (c.stats().accepted_flips, c.stats().attempted_flips))
            .collect();
        Ok(PhaseCsv {
            out,
            phase: ensemble.swap_counter(),
            last_flips,
        })
    }

    pub fn finish(self) -> Result<()> {
        self.out.commit()
    }
}

impl PhaseObserver for PhaseCsv {
    fn on_phase(&mut self, ensemble: &Ensemble) -> ptmc_core::Result<()> {
        self.phase += 1;
        let mut record = vec![self.phase.to_string(), ensemble.sweep_counter().to_string()];
        record.extend(ensemble.chains().iter().map(|c| c.energy().to_string()));
        for (c, last) in ensemble.chains().iter().zip(self.last_flips.iter_mut()) {
            let now = (c.stats().accepted_flips, c.stats().attempted_flips);
            let attempted = now.1 - last.1;
            let rate = if attempted == 0 {
                0.0
            } else {
                (now.0 - last.0) as f64 / attempted as f64
            };
            record.push(rate.to_string());
            *last = now;
        }
        record.extend(ensemble.swap_stats().iter().map(|s| s.rate().to_string()));
        self.out
            .writer()
            .write_record(&record)
            .map_err(io::Error::from)?;
        Ok(())
    }
}
