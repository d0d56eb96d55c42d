//! Layered-ring problem generator.
//!
//! A classical slice of `qubits` spins is replicated `copies` times; each
//! spin couples to its own image in the two neighbouring slices, closing a
//! ring. Each slice is one region and slices alternate between groups.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ising::{Coupling, Group, IsingModel, RegionPartition};
use crate::rng::RngStream;

/// Intra-slice connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// `i -- i+1 (mod qubits)`.
    Ring,
    Complete,
    /// Grid of K(4,4) unit cells; needs `qubits % 8 == 0`.
    Chimera,
}

impl Topology {
    /// Chimera when the size allows it, ring otherwise.
    pub fn default_for(qubits: usize) -> Topology {
        if qubits > 0 && qubits.is_multiple_of(8) {
            Topology::Chimera
        } else {
            Topology::Ring
        }
    }

    pub fn edges(self, qubits: usize) -> Result<Vec<(usize, usize)>> {
        let mut edges = Vec::new();
        match self {
            Topology::Ring => match qubits {
                0 | 1 => {}
                2 => edges.push((0, 1)),
                _ => edges.extend((0..qubits).map(|i| (i, (i + 1) % qubits))),
            },
            Topology::Complete => {
                for i in 0..qubits {
                    for j in i + 1..qubits {
                        edges.push((i, j));
                    }
                }
            }
            Topology::Chimera => {
                if qubits == 0 || !qubits.is_multiple_of(8) {
                    return Err(Error::InvalidArgument(format!(
                        "chimera topology needs a positive multiple of 8 qubits, got {qubits}"
                    )));
                }
                let cells = qubits / 8;
                let rows = (1..=cells)
                    .take_while(|d| d * d <= cells)
                    .filter(|d| cells.is_multiple_of(*d))
                    .last()
                    .unwrap_or(1);
                let cols = cells / rows;
                let base = |r: usize, c: usize| 8 * (r * cols + c);
                for r in 0..rows {
                    for c in 0..cols {
                        let b = base(r, c);
                        for k in 0..4 {
                            for m in 0..4 {
                                edges.push((b + k, b + 4 + m));
                            }
                        }
                        if r + 1 < rows {
                            let below = base(r + 1, c);
                            edges.extend((0..4).map(|k| (b + k, below + k)));
                        }
                        if c + 1 < cols {
                            let right = base(r, c + 1);
                            edges.extend((4..8).map(|k| (b + k, right + k)));
                        }
                    }
                }
            }
        }
        Ok(edges)
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ring" => Ok(Topology::Ring),
            "complete" => Ok(Topology::Complete),
            "chimera" => Ok(Topology::Chimera),
            other => Err(Error::InvalidArgument(format!(
                "unknown topology '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Ring => "ring",
            Topology::Complete => "complete",
            Topology::Chimera => "chimera",
        })
    }
}

/// Distribution of random coupling or field values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disorder {
    Zero,
    /// +1 or -1 with equal probability, one word per value.
    PlusMinusOne,
    /// Standard normal via Box-Muller, two words per value.
    Gaussian,
}

impl Disorder {
    fn draw(self, rng: &mut RngStream) -> f32 {
        match self {
            Disorder::Zero => 0.0,
            Disorder::PlusMinusOne => {
                if rng.next_u32() >> 31 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Disorder::Gaussian => {
                let u1 = 1.0 - rng.next_unit_f32() as f64;
                let u2 = rng.next_unit_f32() as f64;
                ((-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()) as f32
            }
        }
    }
}

impl FromStr for Disorder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Disorder::Zero),
            "pm1" => Ok(Disorder::PlusMinusOne),
            "gauss" => Ok(Disorder::Gaussian),
            other => Err(Error::InvalidArgument(format!(
                "unknown distribution '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Disorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Disorder::Zero => "zero",
            Disorder::PlusMinusOne => "pm1",
            Disorder::Gaussian => "gauss",
        })
    }
}

/// Couplings and fields of one slice, indexed by qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplerSpec {
    pub qubits: usize,
    pub couplings: Vec<(usize, usize, f32)>,
    pub fields: Vec<f32>,
}

impl CouplerSpec {
    /// Draws coupling values in edge order, then one field per qubit.
    pub fn random(
        qubits: usize,
        topology: Topology,
        couplings: Disorder,
        fields: Disorder,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let couplings = topology
            .edges(qubits)?
            .into_iter()
            .map(|(i, j)| (i, j, couplings.draw(rng)))
            .collect();
        let fields = (0..qubits).map(|_| fields.draw(rng)).collect();
        Ok(CouplerSpec {
            qubits,
            couplings,
            fields,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredParams {
    pub qubits: usize,
    pub copies: usize,
    pub topology: Topology,
    pub coupling_dist: Disorder,
    pub field_dist: Disorder,
    pub inter_slice: f32,
}

impl LayeredParams {
    pub fn new(qubits: usize, copies: usize) -> Self {
        LayeredParams {
            qubits,
            copies,
            topology: Topology::default_for(qubits),
            coupling_dist: Disorder::PlusMinusOne,
            field_dist: Disorder::Zero,
            inter_slice: 1.0,
        }
    }

    pub fn sites(&self) -> usize {
        self.qubits * self.copies
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredProblem {
    pub model: IsingModel,
    pub partition: RegionPartition,
}

/// Draws a random slice from `rng` and replicates it into a ring.
pub fn generate_layered(params: &LayeredParams, rng: &mut RngStream) -> Result<LayeredProblem> {
    check_copies(params.copies)?;
    if params.qubits == 0 {
        return Err(Error::InvalidArgument("coupler spec has no qubits".into()));
    }
    let spec = CouplerSpec::random(
        params.qubits,
        params.topology,
        params.coupling_dist,
        params.field_dist,
        rng,
    )?;
    build_layered(&spec, params.copies, params.inter_slice)
}

/// Site `q` of slice `s` is `s * qubits + q`. With two copies the two ring
/// bonds between a qubit's images merge into one coupling of twice the
/// strength.
pub fn build_layered(
    spec: &CouplerSpec,
    copies: usize,
    inter_slice: f32,
) -> Result<LayeredProblem> {
    check_copies(copies)?;
    let q = spec.qubits;
    if q == 0 {
        return Err(Error::InvalidArgument("coupler spec has no qubits".into()));
    }
    if spec.fields.len() != q {
        return Err(Error::InvalidArgument(format!(
            "coupler spec has {} fields for {q} qubits",
            spec.fields.len()
        )));
    }

    let mut fields = Vec::with_capacity(q * copies);
    let mut couplings = Vec::with_capacity((spec.couplings.len() + q) * copies);
    let ring_strength = if copies == 2 {
        2.0 * inter_slice
    } else {
        inter_slice
    };
    let ring_bonds = if copies == 2 { 1 } else { copies };
    for slice in 0..copies {
        let base = slice * q;
        fields.extend_from_slice(&spec.fields);
        couplings.extend(spec.couplings.iter().map(|&(i, j, strength)| Coupling {
            i: base + i,
            j: base + j,
            strength,
        }));
        if slice < ring_bonds {
            let next = ((slice + 1) % copies) * q;
            couplings.extend((0..q).map(|k| Coupling {
                i: base + k,
                j: next + k,
                strength: ring_strength,
            }));
        }
    }
    let model = IsingModel::new(fields, couplings)?;

    let regions = (0..copies)
        .map(|s| (s * q..(s + 1) * q).collect())
        .collect();
    let groups = (0..copies)
        .map(|s| if s % 2 == 0 { Group::A } else { Group::B })
        .collect();
    let partition = RegionPartition::new(regions, groups)?;
    Ok(LayeredProblem { model, partition })
}

fn check_copies(copies: usize) -> Result<()> {
    if copies < 2 || !copies.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "copies must be even and at least 2, got {copies}"
        )));
    }
    Ok(())
}
