use std::fmt;

use crate::error::{Error, Result};
use crate::ising::IsingModel;

/// Half of the region partition. Regions of one group are swept concurrently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    A,
    B,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::A => f.write_str("A"),
            Group::B => f.write_str("B"),
        }
    }
}

/// Site sets that can be updated independently within a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPartition {
    regions: Vec<Vec<usize>>,
    groups: Vec<Group>,
}

impl RegionPartition {
    /// Sites inside each region are sorted ascending. Coverage and
    /// independence are checked by [`verify_partition`].
    pub fn new(mut regions: Vec<Vec<usize>>, groups: Vec<Group>) -> Result<Self> {
        if regions.len() != groups.len() {
            return Err(Error::InvalidPartition(format!(
                "{} regions but {} group labels",
                regions.len(),
                groups.len()
            )));
        }
        for r in &mut regions {
            r.sort_unstable();
        }
        Ok(RegionPartition { regions, groups })
    }

    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    pub fn region(&self, r: usize) -> &[usize] {
        &self.regions[r]
    }

    pub fn group(&self, r: usize) -> Group {
        self.groups[r]
    }

    /// Region indices of `group`, ascending.
    pub fn regions_in(&self, group: Group) -> impl Iterator<Item = usize> + '_ {
        self.groups
            .iter()
            .enumerate()
            .filter(move |(_, g)| **g == group)
            .map(|(r, _)| r)
    }

    pub fn sites_in(&self, group: Group) -> usize {
        self.regions_in(group).map(|r| self.regions[r].len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionViolation {
    SiteOutOfRange {
        region: usize,
        site: usize,
    },
    SiteRepeated {
        site: usize,
    },
    SiteUncovered {
        site: usize,
    },
    /// A coupling joins two different regions of the same group.
    IntraGroupCoupling {
        i: usize,
        j: usize,
        region_i: usize,
        region_j: usize,
        group: Group,
    },
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionViolation::SiteOutOfRange { region, site } => {
                write!(f, "region {region} lists site {site} beyond the model")
            }
            PartitionViolation::SiteRepeated { site } => {
                write!(f, "site {site} appears in more than one region slot")
            }
            PartitionViolation::SiteUncovered { site } => write!(f, "site {site} is in no region"),
            PartitionViolation::IntraGroupCoupling {
                i,
                j,
                region_i,
                region_j,
                group,
            } => write!(
                f,
                "coupling ({i}, {j}) joins regions {region_i} and {region_j}, both in group {group}"
            ),
        }
    }
}

/// Checks that the regions partition the sites and that every coupling
/// between two regions crosses groups.
pub fn verify_partition(
    model: &IsingModel,
    partition: &RegionPartition,
) -> Result<(), PartitionViolation> {
    let n = model.num_sites();
    let mut owner = vec![usize::MAX; n];
    for (r, sites) in partition.regions.iter().enumerate() {
        for &site in sites {
            if site >= n {
                return Err(PartitionViolation::SiteOutOfRange { region: r, site });
            }
            if owner[site] != usize::MAX {
                return Err(PartitionViolation::SiteRepeated { site });
            }
            owner[site] = r;
        }
    }
    if let Some(site) = owner.iter().position(|&r| r == usize::MAX) {
        return Err(PartitionViolation::SiteUncovered { site });
    }
    for c in model.couplings() {
        let (ri, rj) = (owner[c.i], owner[c.j]);
        if ri != rj && partition.groups[ri] == partition.groups[rj] {
            return Err(PartitionViolation::IntraGroupCoupling {
                i: c.i,
                j: c.j,
                region_i: ri,
                region_j: rj,
                group: partition.groups[ri],
            });
        }
    }
    Ok(())
}
