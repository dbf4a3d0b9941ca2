//! Report bodies in CSV or JSON. Bodies never contain wall-clock data
//! unless timings were requested.

use std::sync::Arc;

use fillnorm::bounds::{EquivalenceReport, OperatorCheck};
use fillnorm::builtins::CatalogEntry;
use fillnorm::chain::formal_to_literal;
use fillnorm::complex::{ComplexSpec, FormalChain};
use fillnorm::fill::{format_rational, FillingCertificate};
use fillnorm::fv::{DehnReport, FvTable};
use fillnorm::group::ConfluenceReport;
use fillnorm::report::{fv_csv, fv_json, to_json};
use fillnorm::subgroup::SubgroupCheckReport;
use fillnorm::{Error, Result};
use serde::Serialize;

use crate::job::{Format, Settings};

fn csv_body<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = [String; N]>) -> Result<String> {
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct FillReport {
    complex: String,
    dim: usize,
    target: fillnorm::chain::ChainLiteral,
    target_norm: u64,
    value: Option<u64>,
    certificates: Vec<CertificateOut>,
}

#[derive(Serialize)]
struct CertificateOut {
    radius: usize,
    value: Option<u64>,
    status: String,
    lp_bound: Option<String>,
    witness: Option<fillnorm::chain::ChainLiteral>,
    node_count: u64,
    elapsed_ms: u64,
}

pub fn fill(spec: &Arc<ComplexSpec>, target: &FormalChain, dim: usize, certs: &[FillingCertificate], s: &Settings) -> Result<String> {
    let window_literal = |c: &FillingCertificate| -> Result<Option<_>> {
        let Some(w) = &c.witness else { return Ok(None) };
        let win = spec.instantiate_window(c.radius, s.caps.max_ball_size)?;
        Ok(Some(w.to_literal(&win)))
    };
    let mut out = Vec::new();
    for c in certs {
        out.push(CertificateOut {
            radius: c.radius,
            value: c.value,
            status: c.status.to_string(),
            lp_bound: c.lp_bound.as_ref().map(format_rational),
            witness: window_literal(c)?,
            node_count: c.node_count,
            elapsed_ms: if s.timings { c.elapsed_ms } else { 0 },
        });
    }
    match s.format {
        Format::Json => to_json(&FillReport {
            complex: spec.label().to_string(),
            dim,
            target: formal_to_literal(spec, target),
            target_norm: target.iter().map(|(_, _, c)| c.unsigned_abs()).sum(),
            value: certs.last().and_then(|c| c.value),
            certificates: out,
        }),
        Format::Csv => csv_body(
            ["radius", "value", "status", "lp_bound", "node_count", "ms"],
            out.into_iter().map(|c| {
                [
                    c.radius.to_string(),
                    opt(c.value),
                    c.status,
                    c.lp_bound.unwrap_or_default(),
                    c.node_count.to_string(),
                    if s.timings { c.elapsed_ms.to_string() } else { String::new() },
                ]
            }),
        ),
    }
}

pub fn fv(table: &FvTable, s: &Settings) -> Result<String> {
    match s.format {
        Format::Csv => fv_csv(table, s.timings),
        Format::Json => fv_json(table, s.timings),
    }
}

pub fn operator(checks: &[OperatorCheck], s: &Settings) -> Result<String> {
    match s.format {
        Format::Json => to_json(&checks),
        Format::Csv => csv_body(
            ["dim", "constant", "witness_orbit", "samples", "failures", "max_ratio"],
            checks.iter().map(|c| {
                [
                    c.bound.dim.to_string(),
                    c.bound.constant.to_string(),
                    opt(c.bound.witness_orbit.clone()),
                    c.samples.to_string(),
                    c.failures.to_string(),
                    format!("{}/{}", c.max_ratio.0, c.max_ratio.1),
                ]
            }),
        ),
    }
}

pub fn equivalence(r: &EquivalenceReport, s: &Settings) -> Result<String> {
    match s.format {
        Format::Json => to_json(r),
        Format::Csv => {
            let rows: Result<Vec<[String; 7]>> = r
                .samples
                .iter()
                .map(|x| {
                    let cycle = serde_json::to_string(&x.cycle).map_err(|e| Error::Internal(e.to_string()))?;
                    Ok([
                        x.norm.to_string(),
                        x.fill_a.to_string(),
                        x.fill_b.to_string(),
                        x.fill_back.to_string(),
                        x.forward_ok.to_string(),
                        x.backward_ok.to_string(),
                        cycle,
                    ])
                })
                .collect();
            csv_body(["norm", "fill_a", "fill_b", "fill_back", "forward_ok", "backward_ok", "cycle"], rows?)
        }
    }
}

pub fn dehn(r: &DehnReport, s: &Settings) -> Result<String> {
    match s.format {
        Format::Json => to_json(r),
        Format::Csv => csv_body(
            ["k", "fv", "circuit_max", "bound", "holds"],
            r.rows.iter().map(|x| {
                [x.k.to_string(), x.fv.to_string(), x.circuit_max.to_string(), x.bound.to_string(), x.holds.to_string()]
            }),
        ),
    }
}

pub fn subgroup(r: &SubgroupCheckReport, s: &Settings) -> Result<String> {
    match s.format {
        Format::Json => {
            let mut r = r.clone();
            if !s.timings {
                for row in r.h_table.rows.iter_mut().chain(r.g_table.rows.iter_mut()) {
                    row.ms = 0;
                }
            }
            to_json(&r)
        }
        Format::Csv => csv_body(
            ["k", "fv_h", "h_status", "fv_g_at", "bound", "verdict", "constant"],
            r.rows.iter().map(|x| {
                [
                    x.k.to_string(),
                    x.fv_h.to_string(),
                    x.h_status.to_string(),
                    opt(x.fv_g_at),
                    opt(x.bound),
                    serde_plain(&x.verdict),
                    opt(r.constant),
                ]
            }),
        ),
    }
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

pub fn confluence(r: &ConfluenceReport, s: &Settings) -> Result<String> {
    match s.format {
        Format::Json => to_json(r),
        Format::Csv => csv_body(
            ["length_bound", "mode", "words_checked", "violations", "budget_exhausted", "confluent"],
            [[
                r.length_bound.to_string(),
                serde_plain(&r.mode),
                r.words_checked.to_string(),
                r.violations.len().to_string(),
                r.budget_exhausted.to_string(),
                r.is_confluent().to_string(),
            ]],
        ),
    }
}

pub fn catalog(entries: &[CatalogEntry], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&entries),
        Format::Csv => csv_body(
            ["kind", "name", "top_dim", "orbits_per_dim", "note"],
            entries.iter().map(|e| {
                let orbits: Vec<String> = e.orbits_per_dim.iter().map(|n| n.to_string()).collect();
                [e.kind.to_string(), e.name.clone(), opt(e.top_dim), orbits.join(" "), e.note.clone()]
            }),
        ),
    }
}
