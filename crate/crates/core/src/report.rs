//! Serialized reports: FV tables as CSV or JSON and filling certificates.

use serde::Serialize;

use crate::chain::ChainLiteral;
use crate::complex::ComplexWindow;
use crate::error::{Error, Result};
use crate::fill::{format_rational, FillStatus, FillingCertificate};
use crate::fv::FvTable;

pub const CSV_COLUMNS: [&str; 7] = ["k", "value", "status", "mode", "witness_id", "radius", "ms"];

/// CSV body of an FV table. The `ms` column is left empty unless
/// `timings` is set, so bodies of repeated runs are byte-identical.
pub fn fv_csv(table: &FvTable, timings: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in &table.rows {
        w.write_record([
            r.k.to_string(),
            r.value.to_string(),
            r.status.to_string(),
            r.mode.to_string(),
            r.witness.map(|i| i.to_string()).unwrap_or_default(),
            table.radius.fill.to_string(),
            if timings { r.ms.to_string() } else { String::new() },
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// `# key=value …` header line kept apart from the CSV body.
pub fn header_line(fields: &[(&str, String)]) -> String {
    let parts: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}\n", parts.join(" "))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateJson {
    pub value: Option<u64>,
    pub status: FillStatus,
    pub lp_bound: Option<String>,
    pub witness: Option<ChainLiteral>,
    pub radius: usize,
    pub node_count: u64,
    pub elapsed_ms: u64,
}

pub fn certificate_json(w: &ComplexWindow, cert: &FillingCertificate, timings: bool) -> CertificateJson {
    CertificateJson {
        value: cert.value,
        status: cert.status,
        lp_bound: cert.lp_bound.as_ref().map(format_rational),
        witness: cert.witness.as_ref().map(|c| c.to_literal(w)),
        radius: cert.radius,
        node_count: cert.node_count,
        elapsed_ms: if timings { cert.elapsed_ms } else { 0 },
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Internal(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// JSON variant of an FV table. Per-row times are zeroed unless `timings`.
pub fn fv_json(table: &FvTable, timings: bool) -> Result<String> {
    let mut t = table.clone();
    if !timings {
        for r in &mut t.rows {
            r.ms = 0;
        }
    }
    to_json(&t)
}
