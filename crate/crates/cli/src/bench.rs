//! Timing statistics, speedup and throughput arithmetic.

use anyhow::{bail, Result};

/// Mean and sample standard deviation (n - 1); a single value has zero spread.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Speedup {
    pub workers: usize,
    pub time: f64,
    pub speedup: f64,
    /// Ideal linear speedup, equal to the worker count.
    pub linear: f64,
}

/// `time(1) / time(w)` for every measured worker count; the list must
/// contain a single-worker measurement.
pub fn speedup_table(times: &[(usize, f64)]) -> Result<Vec<Speedup>> {
    let Some(&(_, base)) = times.iter().find(|(w, _)| *w == 1) else {
        bail!("speedup needs a single-worker measurement");
    };
    times
        .iter()
        .map(|&(workers, time)| {
            if time <= 0.0 {
                bail!("non-positive time {time} for {workers} workers");
            }
            Ok(Speedup {
                workers,
                time,
                speedup: base / time,
                linear: workers as f64,
            })
        })
        .collect()
}

/// Variables processed per second of parallel-tempering time.
pub fn throughput(variables: u64, pt_seconds: f64) -> f64 {
    if pt_seconds <= 0.0 {
        return f64::INFINITY;
    }
    variables as f64 / pt_seconds
}
