//! Filling-volume tables and the circuit-based Dehn bound.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{centered_translate, ChainLiteral};
use crate::clock::Stopwatch;
use crate::complex::ComplexSpec;
use crate::config::Caps;
use crate::enumerate::{enumerate_cycles, EnumerationMode};
use crate::error::{Error, Result};
use crate::fill::{fill_norm, FillingInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    /// Max over every cycle of the window, each filled exactly.
    Exact,
    /// Max over a subfamily of cycles.
    LowerBound,
    /// Some enumerated cycle has no filling in the fill window.
    Unfillable,
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RowStatus::Exact => "exact",
            RowStatus::LowerBound => "lower-bound",
            RowStatus::Unfillable => "unfillable",
        })
    }
}

/// Radii for cycle enumeration and for filling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusPolicy {
    pub enumeration: usize,
    pub fill: usize,
}

impl RadiusPolicy {
    pub fn fixed(r: usize) -> Self {
        RadiusPolicy { enumeration: r, fill: r }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FvRow {
    pub k: u64,
    pub value: u64,
    /// Index into [`FvTable::witnesses`] of a cycle attaining the value.
    pub witness: Option<usize>,
    pub mode: EnumerationMode,
    pub status: RowStatus,
    pub cycles: usize,
    pub ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FvWitness {
    pub norm: u64,
    pub fill: u64,
    pub cycle: ChainLiteral,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FvTable {
    pub label: String,
    pub dim: usize,
    pub radius: RadiusPolicy,
    pub rows: Vec<FvRow>,
    pub witnesses: Vec<FvWitness>,
    pub notes: Vec<String>,
}

impl FvTable {
    pub fn row(&self, k: u64) -> Option<&FvRow> {
        self.rows.iter().find(|r| r.k == k)
    }

    pub fn value(&self, k: u64) -> Option<u64> {
        self.row(k).map(|r| r.value)
    }

    /// `(k, value)` pairs of the exact rows.
    pub fn exact_rows(&self) -> Vec<(u64, u64)> {
        self.rows.iter().filter(|r| r.status == RowStatus::Exact).map(|r| (r.k, r.value)).collect()
    }
}

struct Filled {
    norm: u64,
    fill: Option<u64>,
    literal: ChainLiteral,
    ms: u64,
}

fn fill_all(
    spec: &Arc<ComplexSpec>,
    dim: usize,
    k: u64,
    mode: EnumerationMode,
    radius: RadiusPolicy,
    caps: &Caps,
) -> Result<Vec<Filled>> {
    let ew = spec.instantiate_window(radius.enumeration, caps.max_ball_size)?;
    let fw = spec.instantiate_window(radius.fill, caps.max_ball_size)?;
    let cycles = enumerate_cycles(&ew, dim, k, mode, caps)?;
    cycles
        .par_iter()
        .map(|z| {
            let start = Stopwatch::start();
            let literal = z.to_literal(&ew);
            let moved = centered_translate(&ew, z, &fw)?;
            let inst = FillingInstance::new(&fw, moved)?;
            let cert = fill_norm(&inst, caps)?;
            Ok(Filled { norm: z.l1_norm(), fill: cert.value, literal, ms: start.ms() })
        })
        .collect()
}

/// Computes `FV^{n+1}(k)` for `k = 1..=k_max`: the largest filling norm
/// over nonzero `n`-cycles of norm at most `k`.
///
/// In exhaustive mode a blown enumeration cap degrades the affected rows
/// to circuits (1-cycles only), recorded in the row mode and the notes.
pub fn fv_table(
    spec: &Arc<ComplexSpec>,
    dim: usize,
    k_max: u64,
    mode: EnumerationMode,
    radius: RadiusPolicy,
    caps: &Caps,
) -> Result<FvTable> {
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    let mut notes = Vec::new();
    let mut exact_upto = 0;
    let mut filled = Vec::new();
    let mut fallback = Vec::new();
    match mode {
        EnumerationMode::Circuits => {
            fallback = fill_all(spec, dim, k_max, mode, radius, caps)?;
        }
        EnumerationMode::Exhaustive => {
            let mut k = k_max;
            loop {
                match fill_all(spec, dim, k, mode, radius, caps) {
                    Ok(f) => {
                        filled = f;
                        exact_upto = k;
                        break;
                    }
                    Err(Error::ResourceLimit(msg)) if k > 1 => {
                        notes.push(format!("exhaustive enumeration at k={k} stopped: {msg}"));
                        k -= 1;
                    }
                    Err(e) => return Err(e),
                }
            }
            if exact_upto < k_max {
                if dim != 1 {
                    return Err(Error::ResourceLimit(format!(
                        "exhaustive enumeration only reached k={exact_upto} and circuits need dimension 1"
                    )));
                }
                notes.push(format!("rows k>{exact_upto} use simple circuits"));
                fallback = fill_all(spec, dim, k_max, EnumerationMode::Circuits, radius, caps)?;
            }
        }
    }

    let mut witnesses = Vec::new();
    let mut rows = Vec::new();
    let mut best: Option<(u64, usize)> = None;
    let mut unfillable = false;
    let mut count = 0;
    let mut seen = 0usize;
    let mut seen_fallback = 0usize;
    for k in 1..=k_max {
        let exact = k <= exact_upto;
        let mut ms = 0;
        let source: Vec<&Filled> = if exact {
            let new: Vec<&Filled> = filled[seen..].iter().take_while(|f| f.norm <= k).collect();
            seen += new.len();
            new
        } else {
            let new: Vec<&Filled> = fallback[seen_fallback..].iter().take_while(|f| f.norm <= k).collect();
            seen_fallback += new.len();
            new
        };
        for f in source {
            count += 1;
            ms += f.ms;
            match f.fill {
                None => unfillable = true,
                Some(v) => {
                    if best.map_or(true, |(b, _)| v > b) {
                        witnesses.push(FvWitness { norm: f.norm, fill: v, cycle: f.literal.clone() });
                        best = Some((v, witnesses.len() - 1));
                    }
                }
            }
        }
        let status = if unfillable {
            RowStatus::Unfillable
        } else if exact {
            RowStatus::Exact
        } else {
            RowStatus::LowerBound
        };
        let row_mode = if exact { mode } else { EnumerationMode::Circuits };
        rows.push(FvRow {
            k,
            value: best.map_or(0, |b| b.0),
            witness: best.map(|b| b.1),
            mode: row_mode,
            status,
            cycles: count,
            ms,
        });
    }
    Ok(FvTable { label: spec.label().to_string(), dim, radius, rows, witnesses, notes })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnRow {
    pub k: u64,
    pub fv: u64,
    pub circuit_max: u64,
    pub bound: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnReport {
    pub label: String,
    pub radius: RadiusPolicy,
    pub rows: Vec<DehnRow>,
    pub notes: Vec<String>,
}

impl DehnReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Compares exhaustive `FV²(k)` with `k · D(k)`, where `D(k)` is the
/// largest filling norm of a simple circuit of length at most `k`.
/// Only exact rows are compared.
pub fn dehn_consistency(spec: &Arc<ComplexSpec>, k_max: u64, radius: RadiusPolicy, caps: &Caps) -> Result<DehnReport> {
    let fv = fv_table(spec, 1, k_max, EnumerationMode::Exhaustive, radius, caps)?;
    let d = fv_table(spec, 1, k_max, EnumerationMode::Circuits, radius, caps)?;
    let mut notes = fv.notes.clone();
    let mut rows = Vec::new();
    for (r, c) in fv.rows.iter().zip(&d.rows) {
        if c.status == RowStatus::Unfillable {
            notes.push(format!("some circuit of length {} has no filling in the window", c.k));
        }
        if r.status != RowStatus::Exact {
            notes.push(format!("row k={} is not exact and is not compared", r.k));
            continue;
        }
        let bound = r.k * c.value;
        rows.push(DehnRow { k: r.k, fv: r.value, circuit_max: c.value, bound, holds: r.value <= bound });
    }
    Ok(DehnReport { label: spec.label().to_string(), radius, rows, notes })
}
