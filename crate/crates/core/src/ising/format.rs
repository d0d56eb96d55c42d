//! Text problem files.
//!
//! ```text
//! sites 4
//! field 0 0.5
//! coupling 0 1 -1
//! region 0 A 0 1
//! region 1 B 2 3
//! ```
//!
//! `field` lines are optional (missing fields are zero); `region` lines are
//! optional and describe the two-group partition used by regional sweeps.
//! Blank lines and lines starting with `#` are ignored.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::ising::{Coupling, Group, IsingModel, RegionPartition};

pub fn write_problem<W: Write>(
    out: &mut W,
    model: &IsingModel,
    partition: Option<&RegionPartition>,
) -> Result<()> {
    writeln!(out, "sites {}", model.num_sites())?;
    for (i, h) in model.fields().iter().enumerate() {
        writeln!(out, "field {i} {h}")?;
    }
    for c in model.couplings() {
        writeln!(out, "coupling {} {} {}", c.i, c.j, c.strength)?;
    }
    if let Some(p) = partition {
        for r in 0..p.num_regions() {
            write!(out, "region {r} {}", p.group(r))?;
            for site in p.region(r) {
                write!(out, " {site}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn problem_to_string(model: &IsingModel, partition: Option<&RegionPartition>) -> String {
    let mut buf = Vec::new();
    write_problem(&mut buf, model, partition).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn read_problem<R: BufRead>(input: R) -> Result<(IsingModel, Option<RegionPartition>)> {
    let mut num_sites: Option<usize> = None;
    let mut fields = Vec::new();
    let mut couplings = Vec::new();
    let mut regions: Vec<(usize, Group, Vec<usize>)> = Vec::new();

    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let keyword = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();

        if keyword == "sites" {
            if num_sites.is_some() {
                return Err(err("repeated 'sites' header".into()));
            }
            let [n] = rest[..] else {
                return Err(err("expected 'sites N'".into()));
            };
            let n = parse_usize(n).map_err(err)?;
            num_sites = Some(n);
            fields = vec![0.0; n];
            continue;
        }
        let Some(n) = num_sites else {
            return Err(err("expected 'sites N' header first".into()));
        };
        let site = |tok: &str| -> std::result::Result<usize, String> {
            let s = parse_usize(tok)?;
            if s >= n {
                return Err(format!("site {s} out of range for {n} sites"));
            }
            Ok(s)
        };
        match keyword {
            "field" => {
                let [i, h] = rest[..] else {
                    return Err(err("expected 'field i h'".into()));
                };
                fields[site(i).map_err(err)?] = parse_f32(h).map_err(err)?;
            }
            "coupling" => {
                let [i, j, v] = rest[..] else {
                    return Err(err("expected 'coupling i j J'".into()));
                };
                couplings.push(Coupling {
                    i: site(i).map_err(err)?,
                    j: site(j).map_err(err)?,
                    strength: parse_f32(v).map_err(err)?,
                });
            }
            "region" => {
                if rest.len() < 2 {
                    return Err(err("expected 'region r A|B sites...'".into()));
                }
                let index = parse_usize(rest[0]).map_err(err)?;
                if index != regions.len() {
                    return Err(err(format!("region {index} out of sequence")));
                }
                let group = match rest[1] {
                    "A" => Group::A,
                    "B" => Group::B,
                    other => return Err(err(format!("unknown group '{other}'"))),
                };
                let sites = rest[2..]
                    .iter()
                    .map(|t| site(t))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(err)?;
                regions.push((index, group, sites));
            }
            other => return Err(err(format!("unknown keyword '{other}'"))),
        }
    }

    if num_sites.is_none() {
        return Err(Error::Format("missing 'sites N' header".into()));
    }
    let model = IsingModel::new(fields, couplings)?;
    let partition = if regions.is_empty() {
        None
    } else {
        let (groups, sites): (Vec<_>, Vec<_>) = regions.into_iter().map(|(_, g, s)| (g, s)).unzip();
        Some(RegionPartition::new(sites, groups)?)
    };
    Ok((model, partition))
}

fn parse_usize(tok: &str) -> std::result::Result<usize, String> {
    tok.parse().map_err(|_| format!("invalid integer '{tok}'"))
}

fn parse_f32(tok: &str) -> std::result::Result<f32, String> {
    let v: f32 = tok.parse().map_err(|_| format!("invalid number '{tok}'"))?;
    if !v.is_finite() {
        return Err(format!("non-finite value '{tok}'"));
    }
    Ok(v)
}
