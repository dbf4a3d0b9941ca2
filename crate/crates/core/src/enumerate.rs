//! Enumeration of small cycles up to translation, and decomposition of
//! 1-cycles into simple edge circuits.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chain::{canonical_key, Chain, TranslationKey};
use crate::complex::ComplexWindow;
use crate::config::Caps;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumerationMode {
    /// Every nonzero integer cycle of bounded norm.
    Exhaustive,
    /// Simple edge circuits only (dimension 1).
    Circuits,
}

impl std::fmt::Display for EnumerationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnumerationMode::Exhaustive => "exhaustive",
            EnumerationMode::Circuits => "circuits",
        })
    }
}

impl std::str::FromStr for EnumerationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(EnumerationMode::Exhaustive),
            "circuits" => Ok(EnumerationMode::Circuits),
            _ => Err(Error::InvalidInput(format!("unknown mode `{s}`"))),
        }
    }
}

/// One representative per translation class of nonzero `dim`-cycles with
/// ℓ1 norm at most `k` whose support fits in the window, sorted by
/// (norm, translation key). Both signs of a cycle are kept.
pub fn enumerate_cycles(
    w: &ComplexWindow,
    dim: usize,
    k: u64,
    mode: EnumerationMode,
    caps: &Caps,
) -> Result<Vec<Chain>> {
    if k == 0 {
        return Err(Error::InvalidInput("norm bound must be at least 1".into()));
    }
    if dim == 0 || dim > w.top_dim() {
        return Err(Error::InvalidInput(format!("no {dim}-cycles to enumerate in a {}-complex", w.top_dim())));
    }
    let raw = match mode {
        EnumerationMode::Exhaustive => {
            if k > caps.max_exhaustive_k {
                return Err(Error::ResourceLimit(format!(
                    "exhaustive enumeration needs k <= {} (got {k})",
                    caps.max_exhaustive_k
                )));
            }
            exhaustive(w, dim, k, caps)?
        }
        EnumerationMode::Circuits => {
            if dim != 1 {
                return Err(Error::InvalidInput("circuit enumeration is only defined in dimension 1".into()));
            }
            circuits(w, k, caps)?
        }
    };
    dedupe(w, raw)
}

fn dedupe(w: &ComplexWindow, raw: Vec<Chain>) -> Result<Vec<Chain>> {
    let mut classes: BTreeMap<TranslationKey, Chain> = BTreeMap::new();
    for c in raw {
        let (key, canonical) = canonical_key(w, &c)?;
        if classes.contains_key(&key) {
            continue;
        }
        let rep = match Chain::from_formal(w, c.dim(), &canonical) {
            Ok(r) if r.iter().all(|(i, _)| !w.is_clipped(r.dim(), i)) => r,
            _ => c,
        };
        classes.insert(key, rep);
    }
    let mut out: Vec<(u64, TranslationKey, Chain)> =
        classes.into_iter().map(|(key, c)| (c.l1_norm(), key, c)).collect();
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(out.into_iter().map(|t| t.2).collect())
}

struct Search<'a> {
    window: &'a ComplexWindow,
    dim: usize,
    /// Window cell index for each search position.
    cells: Vec<usize>,
    cols: Vec<Vec<(usize, i64)>>,
    /// Face → (position, coefficient), positions ascending.
    incident: Vec<Vec<(usize, i64)>>,
    identity_anchored: usize,
    max_col: u64,
    value: Vec<i64>,
    decided: Vec<bool>,
    residual: Vec<i64>,
    open_faces: BTreeSet<usize>,
    abs_residual: u64,
    budget: u64,
    assigned: usize,
    nodes: u64,
    caps: &'a Caps,
    found: Vec<Chain>,
}

fn exhaustive(w: &ComplexWindow, dim: usize, k: u64, caps: &Caps) -> Result<Vec<Chain>> {
    // Search positions: cells with a complete boundary, identity-anchored
    // cells first, then by (anchor, orbit id).
    let spec = w.spec();
    let mut cells: Vec<usize> = (0..w.cell_count(dim)).filter(|&i| !w.is_clipped(dim, i)).collect();
    cells.sort_by(|&a, &b| {
        let (ca, cb) = (w.cell(dim, a), w.cell(dim, b));
        (&ca.element, &spec.orbits()[ca.orbit].id).cmp(&(&cb.element, &spec.orbits()[cb.orbit].id))
    });
    let identity_anchored = cells.iter().take_while(|&&i| w.cell(dim, i).element.is_identity()).count();
    let faces = w.cell_count(dim - 1);
    let cols: Vec<Vec<(usize, i64)>> = cells.iter().map(|&i| w.boundary_column(dim, i).to_vec()).collect();
    let mut incident = vec![Vec::new(); faces];
    for (p, col) in cols.iter().enumerate() {
        for &(f, c) in col {
            incident[f].push((p, c));
        }
    }
    let max_col = cols.iter().map(|c| c.iter().map(|(_, v)| v.unsigned_abs()).sum::<u64>()).max().unwrap_or(0);
    let n = cells.len();
    let mut s = Search {
        window: w,
        dim,
        cells,
        cols,
        incident,
        identity_anchored,
        max_col,
        value: vec![0; n],
        decided: vec![false; n],
        residual: vec![0; faces],
        open_faces: BTreeSet::new(),
        abs_residual: 0,
        budget: k,
        assigned: 0,
        nodes: 0,
        caps,
        found: Vec::new(),
    };
    s.run()?;
    Ok(s.found)
}

impl Search<'_> {
    fn assign(&mut self, p: usize, v: i64) {
        self.value[p] = v;
        self.decided[p] = true;
        self.budget -= v.unsigned_abs();
        self.assigned += 1;
        self.shift_residual(p, v);
    }

    fn unassign(&mut self, p: usize) {
        let v = self.value[p];
        self.shift_residual(p, -v);
        self.budget += v.unsigned_abs();
        self.assigned -= 1;
        self.value[p] = 0;
        self.decided[p] = false;
    }

    fn shift_residual(&mut self, p: usize, v: i64) {
        for i in 0..self.cols[p].len() {
            let (f, c) = self.cols[p][i];
            let before = self.residual[f];
            let after = before + v * c;
            self.residual[f] = after;
            self.abs_residual = self.abs_residual - before.unsigned_abs() + after.unsigned_abs();
            if after == 0 {
                self.open_faces.remove(&f);
            } else if before == 0 {
                self.open_faces.insert(f);
            }
        }
    }

    fn values(budget: u64) -> impl Iterator<Item = i64> {
        (1..=budget as i64).flat_map(|m| [m, -m])
    }

    fn emit(&mut self) -> Result<()> {
        let terms = (0..self.cells.len()).filter(|&p| self.value[p] != 0).map(|p| (self.cells[p], self.value[p]));
        self.found.push(Chain::from_terms(self.dim, terms));
        if self.found.len() > self.caps.max_enumeration_count {
            return Err(Error::ResourceLimit(format!(
                "more than {} cycles in window radius {}",
                self.caps.max_enumeration_count,
                self.window.radius()
            )));
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.caps.max_search_nodes {
            return Err(Error::ResourceLimit(format!(
                "cycle search exceeded {} nodes",
                self.caps.max_search_nodes
            )));
        }
        if self.abs_residual > self.budget * self.max_col {
            return Ok(());
        }
        // Branch positions: at a closed state, a new seed (the least
        // undecided position that will be nonzero); otherwise, the cell that
        // first repairs the least open face.
        let candidates: Vec<usize> = match self.open_faces.iter().next() {
            None => {
                if self.value.iter().any(|&v| v != 0) {
                    self.emit()?;
                }
                let limit = if self.assigned == 0 { self.identity_anchored } else { self.cells.len() };
                (0..limit).filter(|&p| !self.decided[p]).collect()
            }
            Some(&f) => self.incident[f].iter().map(|&(p, _)| p).filter(|&p| !self.decided[p]).collect(),
        };
        if self.budget == 0 {
            return Ok(());
        }
        let mut zeroed = Vec::new();
        for p in candidates {
            for v in Self::values(self.budget) {
                self.assign(p, v);
                let r = self.run();
                self.unassign(p);
                r?;
            }
            self.decided[p] = true;
            zeroed.push(p);
        }
        for p in zeroed {
            self.decided[p] = false;
        }
        Ok(())
    }
}

/// Endpoints of an edge cell: `Some((source, target))` for an ordinary
/// edge, `None` for a loop with zero boundary.
fn edge_endpoints(w: &ComplexWindow, e: usize) -> Result<Option<(usize, usize)>> {
    let col = w.boundary_column(1, e);
    match col {
        [] => Ok(None),
        [(a, ca), (b, cb)] if *ca == -1 && *cb == 1 => Ok(Some((*a, *b))),
        [(a, ca), (b, cb)] if *ca == 1 && *cb == -1 => Ok(Some((*b, *a))),
        _ => Err(Error::InvalidInput(format!(
            "edge {} does not have a graph-like boundary",
            w.describe_cell(1, e)
        ))),
    }
}

fn circuits(w: &ComplexWindow, k: u64, caps: &Caps) -> Result<Vec<Chain>> {
    let nv = w.cell_count(0);
    let mut adj: Vec<Vec<(usize, i64, usize)>> = vec![Vec::new(); nv];
    let mut found = Vec::new();
    for e in 0..w.cell_count(1) {
        if w.is_clipped(1, e) {
            continue;
        }
        match edge_endpoints(w, e)? {
            Some((s, t)) => {
                adj[s].push((e, 1, t));
                adj[t].push((e, -1, s));
            }
            None => {
                if w.cell(1, e).element.is_identity() {
                    found.push(Chain::from_terms(1, [(e, 1)]));
                    found.push(Chain::from_terms(1, [(e, -1)]));
                }
            }
        }
    }
    for list in adj.iter_mut() {
        list.sort();
    }
    let bases: Vec<usize> = (0..nv).filter(|&v| w.cell(0, v).element.is_identity()).collect();
    for start in bases {
        let mut dist = vec![u64::MAX; nv];
        let mut queue = VecDeque::new();
        dist[start] = 0;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &(_, _, x) in &adj[u] {
                if dist[x] == u64::MAX {
                    dist[x] = dist[u] + 1;
                    queue.push_back(x);
                }
            }
        }
        let mut visited = vec![false; nv];
        visited[start] = true;
        let mut path = Vec::new();
        walk(&adj, &dist, start, start, k, &mut visited, &mut path, &mut found, caps)?;
    }
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    adj: &[Vec<(usize, i64, usize)>],
    dist: &[u64],
    start: usize,
    u: usize,
    k: u64,
    visited: &mut [bool],
    path: &mut Vec<(usize, i64)>,
    found: &mut Vec<Chain>,
    caps: &Caps,
) -> Result<()> {
    let depth = path.len() as u64;
    for &(e, sign, x) in &adj[u] {
        if path.iter().any(|&(pe, _)| pe == e) {
            continue;
        }
        if x == start {
            if depth + 1 <= k {
                let mut c = Chain::from_terms(1, path.iter().copied());
                c.add_term(e, sign);
                found.push(c);
                if found.len() > caps.max_enumeration_count {
                    return Err(Error::ResourceLimit(format!(
                        "more than {} circuits",
                        caps.max_enumeration_count
                    )));
                }
            }
        } else if !visited[x] && depth + 1 + dist[x] <= k {
            visited[x] = true;
            path.push((e, sign));
            let r = walk(adj, dist, start, x, k, visited, path, found, caps);
            path.pop();
            visited[x] = false;
            r?;
        }
    }
    Ok(())
}

/// A 1-cycle written as a sum of simple edge circuits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitDecomposition {
    pub parts: Vec<Chain>,
    pub total_length: u64,
}

/// Splits a 1-cycle into simple edge circuits whose lengths add up to the
/// cycle's ℓ1 norm. Walks follow edges in the direction of their
/// coefficient sign, preferring the least edge index.
pub fn circuit_decompose(w: &ComplexWindow, z: &Chain) -> Result<CircuitDecomposition> {
    if z.dim() != 1 {
        return Err(Error::InvalidInput("circuit decomposition needs a 1-chain".into()));
    }
    if !z.is_cycle(w)? {
        return Err(Error::InvalidInput("circuit decomposition needs a cycle".into()));
    }
    let mut parts = Vec::new();
    let mut remaining: BTreeMap<usize, i64> = BTreeMap::new();
    let mut endpoints: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (e, c) in z.iter() {
        match edge_endpoints(w, e)? {
            None => {
                for _ in 0..c.unsigned_abs() {
                    parts.push(Chain::from_terms(1, [(e, c.signum())]));
                }
            }
            Some(st) => {
                remaining.insert(e, c);
                endpoints.insert(e, st);
            }
        }
    }
    let mut out_edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&e, &(s, t)) in &endpoints {
        out_edges.entry(s).or_default().push(e);
        out_edges.entry(t).or_default().push(e);
    }
    // Next unit leaving `u`: forward along a positive edge from its source,
    // or backward along a negative edge from its target.
    let next_step = |remaining: &BTreeMap<usize, i64>, u: usize| -> Option<(usize, i64, usize)> {
        out_edges.get(&u)?.iter().find_map(|&e| {
            let c = *remaining.get(&e)?;
            let (s, t) = endpoints[&e];
            if c > 0 && s == u {
                Some((e, 1, t))
            } else if c < 0 && t == u {
                Some((e, -1, s))
            } else {
                None
            }
        })
    };
    let take = |remaining: &mut BTreeMap<usize, i64>, e: usize, sign: i64| {
        let c = remaining.get_mut(&e).expect("edge in support");
        *c -= sign;
        if *c == 0 {
            remaining.remove(&e);
        }
    };
    while let Some((&e0, &c0)) = remaining.iter().next() {
        let (s, t) = endpoints[&e0];
        let start = if c0 > 0 { s } else { t };
        let mut vertices = vec![start];
        let mut steps: Vec<(usize, i64)> = Vec::new();
        let mut u = start;
        loop {
            let (e, sign, x) = next_step(&remaining, u).ok_or_else(|| {
                Error::Internal("circuit walk got stuck on a cycle".into())
            })?;
            take(&mut remaining, e, sign);
            steps.push((e, sign));
            if let Some(p) = vertices.iter().position(|&v| v == x) {
                let circuit: Vec<(usize, i64)> = steps.drain(p..).collect();
                vertices.truncate(p + 1);
                parts.push(Chain::from_terms(1, circuit));
                if steps.is_empty() {
                    break;
                }
                u = x;
            } else {
                vertices.push(x);
                u = x;
            }
        }
    }
    let total_length = parts.iter().map(|p| p.l1_norm()).sum();
    Ok(CircuitDecomposition { parts, total_length })
}
