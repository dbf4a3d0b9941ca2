//! Linear-equivalence fits between tabulated functions and the subgroup
//! inequality for filling volumes.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bounds::{operator_check, OperatorCheck};
use crate::chain::literal_to_formal;
use crate::chain_map::ChainMapSpec;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fv::{FvTable, RowStatus};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fit {
    /// Least `C` that verifies every usable row, if any.
    pub constant: Option<u64>,
    /// `(C, k)` pairs skipped because `g(Ck + C)` is not tabulated.
    pub skipped: Vec<(u64, u64)>,
}

/// Least `C` in `1..=c_cap` with `f(k) ≤ C·g(Ck + C) + Ck + C` for every
/// row `k` of `f` at which `g(Ck + C)` is tabulated. A constant with no
/// usable rows verifies nothing and is passed over.
pub fn linear_equiv_fit(f: &[(u64, u64)], g: &[(u64, u64)], c_cap: u64) -> Result<Fit> {
    let g: BTreeMap<u64, u64> = g.iter().copied().collect();
    let mut skipped = Vec::new();
    let mut any_usable = false;
    for c in 1..=c_cap {
        let mut usable = 0;
        let mut ok = true;
        for &(k, fk) in f {
            let arg = c * k + c;
            match g.get(&arg) {
                None => skipped.push((c, k)),
                Some(&gv) => {
                    usable += 1;
                    if fk > c * gv + c * k + c {
                        ok = false;
                    }
                }
            }
        }
        any_usable |= usable > 0;
        if ok && usable > 0 {
            return Ok(Fit { constant: Some(c), skipped });
        }
    }
    if !any_usable {
        return Err(Error::Degenerate(
            "no row of f has a tabulated value of g at Ck+C for any C up to the cap".into(),
        ));
    }
    Ok(Fit { constant: None, skipped })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    /// `g(Ck + C)` is not tabulated.
    Skipped,
    /// The H-side row is not exact; the inequality is only consistent.
    NotExact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupRow {
    pub k: u64,
    pub fv_h: u64,
    pub h_status: RowStatus,
    pub fv_g_at: Option<u64>,
    pub bound: Option<u64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupCheckReport {
    pub h_complex: String,
    pub g_complex: String,
    pub embedding: String,
    pub dim: usize,
    pub h_table: FvTable,
    pub g_table: FvTable,
    pub constant: Option<u64>,
    pub c_cap: u64,
    pub rows: Vec<SubgroupRow>,
    pub embedded_witnesses_checked: usize,
    pub retraction: Option<OperatorCheck>,
}

impl SubgroupCheckReport {
    pub fn verified(&self) -> bool {
        self.constant.is_some()
            && self.rows.iter().all(|r| r.verdict != Verdict::Fails)
            && self.retraction.as_ref().map_or(true, |r| r.failures == 0)
    }
}

/// Optional retraction `G → H` checked for boundedness on random chains.
pub struct Retraction<'a> {
    pub map: &'a Arc<ChainMapSpec>,
    pub radius: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Fits `FV_H ≼ FV_G` with a single constant over the exact H rows.
/// The embedding must send every witness cycle of the H table to a cycle.
pub fn subgroup_inequality_check(
    h_table: FvTable,
    g_table: FvTable,
    embedding: &Arc<ChainMapSpec>,
    c_cap: u64,
    retraction: Option<Retraction<'_>>,
    caps: &Caps,
) -> Result<SubgroupCheckReport> {
    if embedding.source().label() != h_table.label || embedding.target().label() != g_table.label {
        return Err(Error::MapValidation(format!(
            "`{}` maps `{}` to `{}`, tables are for `{}` and `{}`",
            embedding.label(),
            embedding.source().label(),
            embedding.target().label(),
            h_table.label,
            g_table.label
        )));
    }
    if h_table.dim != g_table.dim {
        return Err(Error::InvalidInput("tables have different dimensions".into()));
    }
    let mut checked = 0;
    for w in &h_table.witnesses {
        let z = literal_to_formal(embedding.source(), &w.cycle)?;
        let img = embedding.apply_formal(&z)?;
        if !embedding.target().formal_boundary(&img)?.is_zero() {
            return Err(Error::MapValidation(format!(
                "`{}` sends an H-cycle to a non-cycle",
                embedding.label()
            )));
        }
        checked += 1;
    }
    let h_exact = h_table.exact_rows();
    let g_exact = g_table.exact_rows();
    let fit = linear_equiv_fit(&h_exact, &g_exact, c_cap)?;
    let g_map: BTreeMap<u64, u64> = g_exact.iter().copied().collect();
    let rows = h_table
        .rows
        .iter()
        .map(|r| {
            let (fv_g_at, bound, verdict) = match fit.constant {
                None => (None, None, if r.status == RowStatus::Exact { Verdict::Fails } else { Verdict::NotExact }),
                Some(c) => {
                    let arg = c * r.k + c;
                    match g_map.get(&arg) {
                        None => (None, None, Verdict::Skipped),
                        Some(&gv) => {
                            let b = c * gv + c * r.k + c;
                            let v = if r.status != RowStatus::Exact {
                                Verdict::NotExact
                            } else if r.value <= b {
                                Verdict::Holds
                            } else {
                                Verdict::Fails
                            };
                            (Some(gv), Some(b), v)
                        }
                    }
                }
            };
            SubgroupRow { k: r.k, fv_h: r.value, h_status: r.status, fv_g_at, bound, verdict }
        })
        .collect();
    let retraction = match retraction {
        None => None,
        Some(rt) => {
            if rt.map.source().label() != g_table.label || rt.map.target().label() != h_table.label {
                return Err(Error::MapValidation(format!("`{}` is not a map G → H", rt.map.label())));
            }
            let src = rt.map.source().instantiate_window(rt.radius, caps.max_ball_size)?;
            let dst = rt.map.target().instantiate_window(rt.radius, caps.max_ball_size)?;
            Some(operator_check(rt.map, h_table.dim, &src, &dst, rt.samples, rt.seed)?)
        }
    };
    Ok(SubgroupCheckReport {
        h_complex: h_table.label.clone(),
        g_complex: g_table.label.clone(),
        embedding: embedding.label().to_string(),
        dim: h_table.dim,
        constant: fit.constant,
        c_cap,
        rows,
        embedded_witnesses_checked: checked,
        retraction,
        h_table,
        g_table,
    })
}
