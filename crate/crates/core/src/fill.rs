//! Filling norms: the least ℓ1 norm of an (n+1)-chain in a window whose
//! boundary is a given n-cycle.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::clock::Stopwatch;
use crate::complex::{ComplexSpec, ComplexWindow, FormalChain};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FillStatus {
    /// Exact minimum over chains supported in the window; an upper bound
    /// for the norm in the full complex.
    WindowExactUpperBound,
    /// Two consecutive window radii gave the same value.
    Stabilized,
    /// No integer filling exists inside the window.
    InfeasibleInWindow,
}

impl std::fmt::Display for FillStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FillStatus::WindowExactUpperBound => "window-exact-upper-bound",
            FillStatus::Stabilized => "stabilized",
            FillStatus::InfeasibleInWindow => "infeasible-in-window",
        })
    }
}

/// A cycle to be filled inside a window.
pub struct FillingInstance<'w> {
    window: &'w ComplexWindow,
    target: Chain,
}

impl<'w> FillingInstance<'w> {
    pub fn new(window: &'w ComplexWindow, target: Chain) -> Result<Self> {
        if !target.is_cycle(window)? {
            return Err(Error::InvalidInput("filling target is not a cycle".into()));
        }
        Ok(FillingInstance { window, target })
    }

    pub fn window(&self) -> &ComplexWindow {
        self.window
    }

    pub fn target(&self) -> &Chain {
        &self.target
    }

    pub fn fill_dim(&self) -> usize {
        self.target.dim() + 1
    }

    /// Candidate filling cells: (n+1)-cells whose boundary is in the window.
    fn variables(&self) -> Vec<usize> {
        let d = self.fill_dim();
        if d > self.window.top_dim() {
            return Vec::new();
        }
        (0..self.window.cell_count(d)).filter(|&i| !self.window.is_clipped(d, i)).collect()
    }

    /// Builds `min Σ(u + v)` subject to `∂(u − v) = target`, with `u_j`
    /// at column `2j` and `v_j` at column `2j + 1`. Returns the LP and the
    /// filling cell for each `j`, or `None` if some target cell can never
    /// be reached.
    fn base_program(&self) -> Option<(LinearProgram, Vec<usize>)> {
        let vars = self.variables();
        let d = self.fill_dim();
        let mut rows: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
        for (j, &cell) in vars.iter().enumerate() {
            for &(r, c) in self.window.boundary_column(d, cell) {
                let row = rows.entry(r).or_default();
                row.push((2 * j, c));
                row.push((2 * j + 1, -c));
            }
        }
        if self.target.iter().any(|(r, _)| !rows.contains_key(&r)) {
            return None;
        }
        let mut lp = LinearProgram::new(2 * vars.len());
        lp.cost = vec![1; 2 * vars.len()];
        for (r, row) in rows {
            lp.add_row(row, self.target.coef(r));
        }
        Some((lp, vars))
    }
}

impl FillingInstance<'_> {
    /// Whether some integer chain in the window has the target as boundary.
    fn integer_solvable(&self) -> Option<bool> {
        let d = self.fill_dim();
        let vars = self.variables();
        let mut rows: BTreeMap<usize, usize> = BTreeMap::new();
        for &cell in &vars {
            for &(r, _) in self.window.boundary_column(d, cell) {
                rows.entry(r).or_insert(0);
            }
        }
        for (i, v) in rows.values_mut().enumerate() {
            *v = i;
        }
        let columns: Vec<Vec<(usize, i64)>> = vars
            .iter()
            .map(|&cell| self.window.boundary_column(d, cell).iter().map(|&(r, c)| (rows[&r], c)).collect())
            .collect();
        let rhs: Vec<i64> = rows.keys().map(|&r| self.target.coef(r)).collect();
        crate::lattice::integer_solvable(&columns, rows.len(), &rhs)
    }
}

/// Exact rational optimum of the LP relaxation.
#[derive(Clone, Debug, PartialEq)]
pub struct Relaxation {
    pub value: BigRational,
    /// Fractional filling coefficients, one per window cell in the support.
    pub witness: Vec<(usize, BigRational)>,
}

pub fn lp_relaxation(inst: &FillingInstance<'_>) -> Result<Option<Relaxation>> {
    if inst.target.is_zero() {
        return Ok(Some(Relaxation { value: BigRational::zero(), witness: Vec::new() }));
    }
    let Some((lp, vars)) = inst.base_program() else { return Ok(None) };
    match lp.solve()? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Internal("filling LP is unbounded".into())),
        LpOutcome::Optimal { value, x } => {
            check_split(&x)?;
            let witness = vars
                .iter()
                .enumerate()
                .map(|(j, &cell)| (cell, &x[2 * j] - &x[2 * j + 1]))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            Ok(Some(Relaxation { value, witness }))
        }
    }
}

// At an optimum the positive and negative parts never overlap.
fn check_split(x: &[BigRational]) -> Result<()> {
    for pair in x.chunks(2) {
        if pair[0].is_positive() && pair[1].is_positive() {
            return Err(Error::Internal("LP optimum uses both signs of one cell".into()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FillingCertificate {
    /// `None` when no filling exists in the window.
    pub value: Option<u64>,
    pub witness: Option<Chain>,
    /// Root LP relaxation value (`None` if the relaxation is infeasible).
    pub lp_bound: Option<BigRational>,
    pub status: FillStatus,
    pub radius: usize,
    pub node_count: u64,
    pub elapsed_ms: u64,
}

impl FillingCertificate {
    pub fn is_feasible(&self) -> bool {
        self.value.is_some()
    }
}

struct Node {
    bound: BigRational,
    seq: u64,
    lower: BTreeMap<usize, i64>,
    upper: BTreeMap<usize, i64>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        (&self.bound, self.seq).cmp(&(&o.bound, o.seq))
    }
}

/// Solves the base program under variable bounds. Lower bounds shift the
/// variable, upper bounds of zero remove it, other upper bounds add a
/// slack row.
fn solve_bounded(
    base: &LinearProgram,
    lower: &BTreeMap<usize, i64>,
    upper: &BTreeMap<usize, i64>,
) -> Result<Option<(BigRational, Vec<BigRational>)>> {
    let n = base.num_vars;
    let lo = |j: usize| lower.get(&j).copied().unwrap_or(0);
    let mut keep: Vec<Option<usize>> = vec![None; n];
    let mut next = 0;
    for (j, slot) in keep.iter_mut().enumerate() {
        let up = upper.get(&j).copied();
        if let Some(u) = up {
            if u < lo(j) {
                return Ok(None);
            }
            if u == lo(j) {
                continue;
            }
        }
        *slot = Some(next);
        next += 1;
    }
    let slack_rows: Vec<(usize, i64)> = upper
        .iter()
        .filter_map(|(&j, &u)| keep[j].map(|k| (k, u - lo(j))))
        .collect();
    let total = next + slack_rows.len();
    let mut lp = LinearProgram::new(total);
    let mut offset = BigRational::zero();
    for j in 0..n {
        let c = base.cost[j];
        if let Some(k) = keep[j] {
            lp.cost[k] = c;
        }
        let fixed = lo(j);
        offset += BigRational::from_integer((c * fixed).into());
    }
    for (row, &b) in base.rows.iter().zip(&base.rhs) {
        let mut rhs = b;
        let mut r = Vec::new();
        for &(j, a) in row {
            rhs -= a * lo(j);
            if let Some(k) = keep[j] {
                r.push((k, a));
            }
        }
        lp.add_row(r, rhs);
    }
    for (s, &(k, bound)) in slack_rows.iter().enumerate() {
        lp.add_row(vec![(k, 1), (next + s, 1)], bound);
    }
    match lp.solve()? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Internal("bounded filling LP is unbounded".into())),
        LpOutcome::Optimal { value, x } => {
            let mut full = vec![BigRational::zero(); n];
            for j in 0..n {
                let shift = BigRational::from_integer(lo(j).into());
                full[j] = match keep[j] {
                    Some(k) => &x[k] + shift,
                    None => shift,
                };
            }
            Ok(Some((value + offset, full)))
        }
    }
}

fn floor(x: &BigRational) -> i64 {
    x.floor().to_integer().to_i64().expect("bounded LP value")
}

fn ceil_big(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

/// Minimum-norm integer filling of `inst` inside its window, by best-bound
/// branch and bound on the LP relaxation (most fractional variable, ties
/// by cell index). The witness is re-checked against the window's
/// boundary matrix before returning.
pub fn fill_norm(inst: &FillingInstance<'_>, caps: &Caps) -> Result<FillingCertificate> {
    let start = Stopwatch::start();
    let radius = inst.window.radius();
    if inst.target.is_zero() {
        return Ok(FillingCertificate {
            value: Some(0),
            witness: Some(Chain::zero(inst.fill_dim())),
            lp_bound: Some(BigRational::zero()),
            status: FillStatus::WindowExactUpperBound,
            radius,
            node_count: 0,
            elapsed_ms: start.ms(),
        });
    }
    let infeasible = |lp_bound, nodes| FillingCertificate {
        value: None,
        witness: None,
        lp_bound,
        status: FillStatus::InfeasibleInWindow,
        radius,
        node_count: nodes,
        elapsed_ms: start.ms(),
    };
    let Some((base, vars)) = inst.base_program() else {
        return Ok(infeasible(None, 0));
    };
    let empty = BTreeMap::new();
    let Some((root_value, root_x)) = solve_bounded(&base, &empty, &empty)? else {
        return Ok(infeasible(None, 1));
    };
    check_split(&root_x)?;
    if root_x.iter().any(|v| !v.is_integer()) && inst.integer_solvable() == Some(false) {
        return Ok(infeasible(Some(root_value), 1));
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Reverse(Node { bound: root_value.clone(), seq, lower: BTreeMap::new(), upper: BTreeMap::new() }));
    let mut cached_root = Some(root_x);
    let mut incumbent: Option<(BigInt, Vec<BigRational>)> = None;
    let mut nodes = 0u64;
    while let Some(Reverse(node)) = heap.pop() {
        if let Some((best, _)) = &incumbent {
            if ceil_big(&node.bound) >= *best {
                continue;
            }
        }
        nodes += 1;
        if nodes > caps.max_ilp_nodes {
            let lb = ceil_big(&node.bound);
            let ub = incumbent.as_ref().map(|(v, _)| v.to_string()).unwrap_or_else(|| "none".into());
            return Err(Error::ResourceLimit(format!(
                "branch and bound exceeded {} nodes (best lower bound {lb}, incumbent {ub})",
                caps.max_ilp_nodes
            )));
        }
        let solved = match cached_root.take() {
            Some(x) => Some((node.bound.clone(), x)),
            None => solve_bounded(&base, &node.lower, &node.upper)?,
        };
        let Some((value, x)) = solved else { continue };
        if let Some((best, _)) = &incumbent {
            if ceil_big(&value) >= *best {
                continue;
            }
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let branch = x
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_integer())
            .map(|(j, v)| {
                let frac = v - v.floor();
                ((frac - &half).abs(), j)
            })
            .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        match branch {
            None => {
                incumbent = Some((value.to_integer(), x));
            }
            Some((_, j)) => {
                let f = floor(&x[j]);
                let mut down = Node { bound: value.clone(), seq: 0, lower: node.lower.clone(), upper: node.upper.clone() };
                down.upper.insert(j, f);
                let mut up = Node { bound: value, seq: 0, lower: node.lower, upper: node.upper };
                up.lower.insert(j, f + 1);
                for mut child in [down, up] {
                    seq += 1;
                    child.seq = seq;
                    heap.push(Reverse(child));
                }
            }
        }
    }
    let Some((value, x)) = incumbent else {
        return Ok(infeasible(Some(root_value), nodes));
    };
    let mut witness = Chain::zero(inst.fill_dim());
    for (j, &cell) in vars.iter().enumerate() {
        let c = (&x[2 * j] - &x[2 * j + 1]).to_integer().to_i64().expect("small coefficient");
        witness.add_term(cell, c);
    }
    let value = value.to_u64().ok_or_else(|| Error::Internal("negative filling value".into()))?;
    if witness.boundary(inst.window)? != inst.target {
        return Err(Error::Internal("filling witness does not bound the target".into()));
    }
    if witness.l1_norm() != value {
        return Err(Error::Internal("filling witness norm differs from objective".into()));
    }
    if root_value > BigRational::from_integer(value.into()) {
        return Err(Error::Internal("LP bound exceeds integer optimum".into()));
    }
    Ok(FillingCertificate {
        value: Some(value),
        witness: Some(witness),
        lp_bound: Some(root_value),
        status: FillStatus::WindowExactUpperBound,
        radius,
        node_count: nodes,
        elapsed_ms: start.ms(),
    })
}

/// Fills `target` on windows of radius `r0, r0+1, …, r_max`, stopping when
/// two consecutive radii give the same value. Radii too small to hold the
/// target are skipped. The last certificate carries
/// status `Stabilized` in that case.
pub fn escalate_until_stable(
    spec: &Arc<ComplexSpec>,
    target: &FormalChain,
    dim: usize,
    r0: usize,
    r_max: usize,
    caps: &Caps,
) -> Result<Vec<FillingCertificate>> {
    if r_max < r0 {
        return Err(Error::InvalidInput(format!("r_max {r_max} is below r0 {r0}")));
    }
    let mut out: Vec<FillingCertificate> = Vec::new();
    for r in r0..=r_max {
        let w = spec.instantiate_window(r, caps.max_ball_size)?;
        let chain = match Chain::from_formal(&w, dim, target) {
            Ok(c) if c.iter().all(|(i, _)| !w.is_clipped(dim, i)) => c,
            Ok(_) | Err(Error::WindowTooSmall(_)) => continue,
            Err(e) => return Err(e),
        };
        let inst = FillingInstance::new(&w, chain)?;
        let mut cert = fill_norm(&inst, caps)?;
        if let (Some(prev), Some(cur)) = (out.last().and_then(|c| c.value), cert.value) {
            if cur > prev {
                return Err(Error::Internal(format!("filling value grew from {prev} to {cur} with the window")));
            }
            if cur == prev {
                cert.status = FillStatus::Stabilized;
                out.push(cert);
                return Ok(out);
            }
        }
        out.push(cert);
    }
    if out.is_empty() {
        return Err(Error::WindowTooSmall(format!("target does not fit any radius up to {r_max}")));
    }
    Ok(out)
}

pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}
