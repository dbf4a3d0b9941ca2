//! Browser bindings for the fillnorm demo page. Every export takes plain
//! numbers or strings and returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch.

use std::sync::Arc;

use fillnorm::builtins;
use fillnorm::chain::{formal_to_literal, Chain, ChainLiteral};
use fillnorm::complex::FormalChain;
use fillnorm::config::Caps;
use fillnorm::enumerate::EnumerationMode;
use fillnorm::fill::{fill_norm, format_rational, FillingInstance};
use fillnorm::fv::{fv_table, RadiusPolicy};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

fn caps() -> Caps {
    Caps { max_ball_size: 2_000, max_ilp_nodes: 5_000, max_enumeration_count: 20_000, ..Caps::default() }
}

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    let v = match r {
        Ok(t) => serde_json::to_value(t).map_err(|e| e.to_string()),
        Err(e) => Err(e),
    };
    match v {
        Ok(v) => v.to_string(),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

#[derive(Serialize)]
pub struct Filling {
    pub value: Option<u64>,
    pub lp_bound: Option<String>,
    pub boundary_norm: u64,
    pub radius: usize,
    pub witness: Option<ChainLiteral>,
}

#[derive(Serialize)]
pub struct RectangleFill {
    pub width: u32,
    pub height: u32,
    pub boundary: ChainLiteral,
    pub filling: Filling,
}

fn z2_word(a: i64, b: i64) -> String {
    let x = if a >= 0 { "x" } else { "X" }.repeat(a.unsigned_abs() as usize);
    let y = if b >= 0 { "y" } else { "Y" }.repeat(b.unsigned_abs() as usize);
    x + &y
}

fn rectangle(width: u32, height: u32) -> Result<RectangleFill, String> {
    if !(1..=4).contains(&width) || !(1..=4).contains(&height) {
        return Err("width and height must be between 1 and 4".into());
    }
    let spec = Arc::new(builtins::complex("z2-torus").map_err(|e| e.to_string())?);
    let (w, h) = (width as i64, height as i64);
    let (x0, y0) = (-(w / 2), -(h / 2));
    let r0 = spec.orbit_index("r0").expect("torus has r0");
    let mut block = FormalChain::new();
    for i in 0..w {
        for j in 0..h {
            let g = spec.group().element(&z2_word(x0 + i, y0 + j)).map_err(|e| e.to_string())?;
            block.add(r0, g, 1);
        }
    }
    let boundary = spec.formal_boundary(&block).map_err(|e| e.to_string())?;
    let radius = (width.max(height) as usize).div_ceil(2) + 2;
    let win = spec.instantiate_window(radius, caps().max_ball_size).map_err(|e| e.to_string())?;
    let target = Chain::from_formal(&win, 1, &boundary).map_err(|e| e.to_string())?;
    let cert = FillingInstance::new(&win, target.clone())
        .and_then(|inst| fill_norm(&inst, &caps()))
        .map_err(|e| e.to_string())?;
    Ok(RectangleFill {
        width,
        height,
        boundary: formal_to_literal(&spec, &boundary),
        filling: Filling {
            value: cert.value,
            lp_bound: cert.lp_bound.as_ref().map(format_rational),
            boundary_norm: target.l1_norm(),
            radius,
            witness: cert.witness.as_ref().map(|c| c.to_literal(&win)),
        },
    })
}

/// Minimal filling of the boundary of a `width × height` block of squares
/// in the plane.
#[wasm_bindgen]
pub fn fill_rectangle(width: u32, height: u32) -> String {
    respond(rectangle(width, height))
}

fn table(complex: &str, dim: usize, k_max: u32, radius: u32) -> Result<fillnorm::fv::FvTable, String> {
    if !["z2-torus", "z3-cubes", "heisenberg3", "free2", "z2-redundant"].contains(&complex) {
        return Err(format!("`{complex}` is not offered on this page"));
    }
    if !(1..=8).contains(&k_max) || !(1..=4).contains(&radius) {
        return Err("k_max must be 1..8 and radius 1..4".into());
    }
    let spec = Arc::new(builtins::complex(complex).map_err(|e| e.to_string())?);
    let mut t = fv_table(&spec, dim, k_max as u64, EnumerationMode::Exhaustive, RadiusPolicy::fixed(radius as usize), &caps())
        .map_err(|e| e.to_string())?;
    for r in &mut t.rows {
        r.ms = 0;
    }
    Ok(t)
}

/// Filling-volume table of a built-in complex.
#[wasm_bindgen]
pub fn fv_table_json(complex: &str, dim: usize, k_max: u32, radius: u32) -> String {
    respond(table(complex, dim, k_max, radius))
}

#[derive(Serialize)]
pub struct GerstenRow {
    pub multiple: i64,
    pub value: Option<u64>,
    pub lp_bound: Option<String>,
}

#[derive(Serialize)]
pub struct GerstenReport {
    pub k: u32,
    pub rows: Vec<GerstenRow>,
    /// True when the norm of 2k·z differs from k times the norm of 2·z.
    pub not_regular: bool,
}

fn gersten_rows(k: u32) -> Result<GerstenReport, String> {
    if !(2..=6).contains(&k) {
        return Err("k must be between 2 and 6".into());
    }
    let spec = Arc::new(builtins::complex(&format!("gersten({k})")).map_err(|e| e.to_string())?);
    let win = spec.instantiate_window(0, caps().max_ball_size).map_err(|e| e.to_string())?;
    let edge = spec.orbit_index("ex").expect("gersten has ex");
    let mut rows = Vec::new();
    for m in 1..=2 * k as i64 {
        let mut f = FormalChain::new();
        f.add(edge, fillnorm::group::GroupElement::identity(), m);
        let target = Chain::from_formal(&win, 1, &f).map_err(|e| e.to_string())?;
        let cert = FillingInstance::new(&win, target)
            .and_then(|inst| fill_norm(&inst, &caps()))
            .map_err(|e| e.to_string())?;
        rows.push(GerstenRow { multiple: m, value: cert.value, lp_bound: cert.lp_bound.as_ref().map(format_rational) });
    }
    let two = rows[1].value;
    let many = rows[2 * k as usize - 1].value;
    let not_regular = matches!((two, many), (Some(a), Some(b)) if b != k as u64 * a);
    Ok(GerstenReport { k, rows, not_regular })
}

/// Filling norms of `m·z` for `m = 1..2k` in the Gersten complex, where `z`
/// is the edge loop. Odd multiples have no integer filling.
#[wasm_bindgen]
pub fn gersten(k: u32) -> String {
    respond(gersten_rows(k))
}
