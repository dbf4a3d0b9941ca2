#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use fillnorm::builtins;
use fillnorm::chain::{canonical_key, Chain, TranslationKey};
use fillnorm::complex::{ComplexSpec, ComplexWindow, FormalChain};
use fillnorm::config::Caps;
use fillnorm::group::{GroupElement, GroupPresentation};

pub fn caps() -> Caps {
    Caps::default()
}

pub fn spec(name: &str) -> Arc<ComplexSpec> {
    Arc::new(builtins::complex(name).unwrap())
}

pub fn window(name: &str, r: usize) -> ComplexWindow {
    spec(name).instantiate_window(r, caps().max_ball_size).unwrap()
}

pub fn el(p: &GroupPresentation, w: &str) -> GroupElement {
    p.element(w).unwrap()
}

/// Chain from `(coef, orbit id, word)` triples.
pub fn chain(w: &ComplexWindow, dim: usize, terms: &[(i64, &str, &str)]) -> Chain {
    let spec = w.spec();
    let mut f = FormalChain::new();
    for &(c, id, word) in terms {
        f.add(spec.orbit_index(id).unwrap(), el(spec.group(), word), c);
    }
    Chain::from_formal(w, dim, &f).unwrap()
}

fn power(letter: &str, inverse: &str, n: i64) -> String {
    let s = if n >= 0 { letter } else { inverse };
    s.repeat(n.unsigned_abs() as usize)
}

/// Z² group element `x^a y^b`.
pub fn z2(a: i64, b: i64) -> String {
    format!("{}{}", power("x", "X", a), power("y", "Y", b))
}

/// Boundary of the `w × h` rectangle of squares with lower-left corner
/// `x^a y^b`, in a z2-torus window.
pub fn rectangle(win: &ComplexWindow, a: i64, b: i64, w: i64, h: i64) -> Chain {
    let mut f = FormalChain::new();
    let spec = win.spec();
    let r0 = spec.orbit_index("r0").unwrap();
    for i in 0..w {
        for j in 0..h {
            f.add(r0, el(spec.group(), &z2(a + i, b + j)), 1);
        }
    }
    let b = spec.formal_boundary(&f).unwrap();
    Chain::from_formal(win, 1, &b).unwrap()
}

/// Exhaustive search for the least ℓ1 norm of an integer (dim+1)-chain
/// whose boundary is `target`, trying budgets `0..=max` in turn. Each
/// branch picks the least face with nonzero residual and tries every
/// incident cell with every coefficient that fits the budget.
pub fn oracle_min_fill(w: &ComplexWindow, target: &Chain, max: u64) -> Option<u64> {
    let d = target.dim() + 1;
    if d > w.top_dim() {
        return if target.is_zero() { Some(0) } else { None };
    }
    let cells: Vec<usize> = (0..w.cell_count(d)).filter(|&i| !w.is_clipped(d, i)).collect();
    let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (p, &c) in cells.iter().enumerate() {
        for &(f, _) in w.boundary_column(d, c) {
            incident.entry(f).or_default().push(p);
        }
    }
    let max_col = cells
        .iter()
        .map(|&c| w.boundary_column(d, c).iter().map(|(_, v)| v.unsigned_abs()).sum::<u64>())
        .max()
        .unwrap_or(1);
    let residual: BTreeMap<usize, i64> = target.iter().collect();
    for budget in 0..=max {
        let mut decided = vec![false; cells.len()];
        if dfs_fill(w, d, &cells, &incident, max_col, residual.clone(), budget, &mut decided) {
            return Some(budget);
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn dfs_fill(
    w: &ComplexWindow,
    d: usize,
    cells: &[usize],
    incident: &BTreeMap<usize, Vec<usize>>,
    max_col: u64,
    residual: BTreeMap<usize, i64>,
    budget: u64,
    decided: &mut Vec<bool>,
) -> bool {
    let Some((&f, _)) = residual.iter().next() else { return true };
    let abs: u64 = residual.values().map(|v| v.unsigned_abs()).sum();
    if abs > budget * max_col {
        return false;
    }
    let Some(cands) = incident.get(&f) else { return false };
    let cands: Vec<usize> = cands.iter().copied().filter(|&p| !decided[p]).collect();
    let mut ok = false;
    let mut zeroed = Vec::new();
    for p in cands {
        decided[p] = true;
        for m in 1..=budget as i64 {
            for v in [m, -m] {
                let mut r = residual.clone();
                for &(g, c) in w.boundary_column(d, cells[p]) {
                    let e = r.entry(g).or_insert(0);
                    *e -= v * c;
                    if *e == 0 {
                        r.remove(&g);
                    }
                }
                if dfs_fill(w, d, cells, incident, max_col, r, budget - m as u64, decided) {
                    ok = true;
                    break;
                }
            }
            if ok {
                break;
            }
        }
        zeroed.push(p);
        if ok {
            break;
        }
    }
    for p in zeroed {
        decided[p] = false;
    }
    ok
}

/// All nonzero `dim`-cycles of the window with ℓ1 ≤ k, found by running
/// through every coefficient vector on the unclipped cells.
pub fn brute_force_cycles(w: &ComplexWindow, dim: usize, k: u64) -> Vec<Chain> {
    let cells: Vec<usize> = (0..w.cell_count(dim)).filter(|&i| !w.is_clipped(dim, i)).collect();
    let mut out = Vec::new();
    let mut current: Vec<(usize, i64)> = Vec::new();
    fn rec(w: &ComplexWindow, dim: usize, cells: &[usize], i: usize, budget: u64, current: &mut Vec<(usize, i64)>, out: &mut Vec<Chain>) {
        if i == cells.len() {
            if current.is_empty() {
                return;
            }
            let c = Chain::from_terms(dim, current.iter().copied());
            let mut bd: BTreeMap<usize, i64> = BTreeMap::new();
            for (cell, v) in c.iter() {
                for &(f, x) in w.boundary_column(dim, cell) {
                    *bd.entry(f).or_insert(0) += v * x;
                }
            }
            if bd.values().all(|&v| v == 0) {
                out.push(c);
            }
            return;
        }
        rec(w, dim, cells, i + 1, budget, current, out);
        for m in 1..=budget as i64 {
            for v in [m, -m] {
                current.push((cells[i], v));
                rec(w, dim, cells, i + 1, budget - m as u64, current, out);
                current.pop();
            }
        }
    }
    rec(w, dim, &cells, 0, k, &mut current, &mut out);
    out
}

pub fn class_keys(w: &ComplexWindow, cycles: &[Chain]) -> BTreeSet<TranslationKey> {
    cycles.iter().map(|c| canonical_key(w, c).unwrap().0).collect()
}

/// Rank by fraction-free Gaussian elimination over i128.
pub fn rank_oracle(rows: usize, columns: &[Vec<(usize, i64)>]) -> usize {
    let mut m: Vec<Vec<i128>> = columns
        .iter()
        .map(|c| {
            let mut v = vec![0i128; rows];
            for &(r, x) in c {
                v[r] += x as i128;
            }
            v
        })
        .collect();
    let mut rank = 0;
    let ncols = m.len();
    for r in 0..rows {
        let Some(p) = (rank..ncols).find(|&j| m[j][r] != 0) else { continue };
        m.swap(rank, p);
        for j in rank + 1..ncols {
            if m[j][r] != 0 {
                let (a, b) = (m[rank][r], m[j][r]);
                for i in 0..rows {
                    m[j][i] = m[j][i] * a - m[rank][i] * b;
                }
                let g = m[j].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    for x in m[j].iter_mut() {
                        *x /= g;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Dimension of the kernel of the boundary on unclipped `dim`-cells.
pub fn cycle_rank_oracle(w: &ComplexWindow, dim: usize) -> usize {
    let cols: Vec<Vec<(usize, i64)>> = (0..w.cell_count(dim))
        .filter(|&i| !w.is_clipped(dim, i))
        .map(|i| w.boundary_column(dim, i).to_vec())
        .collect();
    if dim == 0 {
        return cols.len();
    }
    cols.len() - rank_oracle(w.cell_count(dim - 1), &cols)
}

/// Heisenberg element as the unitriangular matrix [[1,a,c],[0,1,b],[0,0,1]].
pub type Heis = (i64, i64, i64);

pub fn heis_mul(p: Heis, q: Heis) -> Heis {
    (p.0 + q.0, p.1 + q.1, p.2 + q.2 + p.0 * q.1)
}

pub fn heis_letter(name: &str) -> Heis {
    match name {
        "x" => (1, 0, 0),
        "X" => (-1, 0, 0),
        "y" => (0, 1, 0),
        "Y" => (0, -1, 0),
        "z" => (0, 0, 1),
        "Z" => (0, 0, -1),
        _ => panic!("not a Heisenberg letter: {name}"),
    }
}

pub fn heis_word(w: &str) -> Heis {
    w.chars().fold((0, 0, 0), |acc, c| heis_mul(acc, heis_letter(&c.to_string())))
}
