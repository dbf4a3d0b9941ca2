//! Operator bounds of chain maps and two-sided comparison of filling
//! norms across complexes.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, ChainLiteral};
use crate::chain_map::ChainMapSpec;
use crate::complex::ComplexWindow;
use crate::config::Caps;
use crate::enumerate::{enumerate_cycles, EnumerationMode};
use crate::error::{Error, Result};
use crate::fill::{fill_norm, FillingInstance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorBound {
    pub map: String,
    pub dim: usize,
    pub constant: u64,
    /// Source orbit whose image attains the constant.
    pub witness_orbit: Option<String>,
}

/// `C = max ‖φ(α)‖₁` over the source orbit representatives `α` in `dim`.
pub fn operator_bound(map: &ChainMapSpec, dim: usize) -> Result<OperatorBound> {
    if dim > map.source().top_dim() {
        return Err(Error::InvalidInput(format!(
            "`{}` has no {dim}-cells",
            map.source().label()
        )));
    }
    let mut best: Option<(u64, String)> = None;
    for (id, n) in map.basis_norms(dim) {
        if best.as_ref().map_or(true, |(b, _)| n > *b) {
            best = Some((n, id));
        }
    }
    Ok(OperatorBound {
        map: map.label().to_string(),
        dim,
        constant: best.as_ref().map_or(0, |b| b.0),
        witness_orbit: best.map(|b| b.1),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorCheck {
    pub bound: OperatorBound,
    pub samples: usize,
    pub failures: usize,
    /// Largest observed `‖φ(x)‖ / ‖x‖` as a reduced pair.
    pub max_ratio: (u64, u64),
}

fn ratio_gt(a: (u64, u64), b: (u64, u64)) -> bool {
    (a.0 as u128) * (b.1 as u128) > (b.0 as u128) * (a.1 as u128)
}

fn reduced(n: u64, d: u64) -> (u64, u64) {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = gcd(n, d).max(1);
    (n / g, d / g)
}

/// Random chain on the given cells with 1 to `max_terms` terms and
/// coefficients in `-3..=3`. Never zero when `cells` is nonempty.
pub fn random_chain(rng: &mut ChaCha8Rng, dim: usize, cells: &[usize], max_terms: usize) -> Chain {
    loop {
        let terms = rng.gen_range(1..=max_terms.max(1));
        let mut c = Chain::zero(dim);
        for _ in 0..terms {
            let &i = cells.choose(rng).expect("nonempty cell list");
            let mut v = rng.gen_range(-3i64..=3);
            if v == 0 {
                v = 1;
            }
            c.add_term(i, v);
        }
        if !c.is_zero() {
            return c;
        }
    }
}

/// Verifies `‖φ(x)‖ ≤ C‖x‖` on `samples` random chains of the source
/// window whose images lie in the target window.
pub fn operator_check(
    map: &Arc<ChainMapSpec>,
    dim: usize,
    src: &ComplexWindow,
    dst: &ComplexWindow,
    samples: usize,
    seed: u64,
) -> Result<OperatorCheck> {
    let bound = operator_bound(map, dim)?;
    let inst = map.instantiate(src, dst)?;
    let cells: Vec<usize> = (0..src.cell_count(dim)).filter(|&i| inst.column(dim, i).is_some()).collect();
    if cells.is_empty() {
        return Err(Error::WindowTooSmall(format!(
            "no {dim}-cell of `{}` maps into the target window",
            src.spec().label()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut max_ratio = (0, 1);
    for _ in 0..samples {
        let x = random_chain(&mut rng, dim, &cells, 6);
        let y = inst.apply(&x)?;
        let r = (y.l1_norm(), x.l1_norm());
        if y.l1_norm() > bound.constant * x.l1_norm() {
            failures += 1;
        }
        if ratio_gt(r, max_ratio) {
            max_ratio = reduced(r.0, r.1);
        }
    }
    Ok(OperatorCheck { bound, samples, failures, max_ratio })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceSample {
    pub cycle: ChainLiteral,
    pub norm: u64,
    /// Filling norm in the first complex.
    pub fill_a: u64,
    /// Filling norm of the transported cycle in the second complex.
    pub fill_b: u64,
    /// Filling norm after transporting back.
    pub fill_back: u64,
    /// True if transporting there and back returns the cycle itself.
    pub round_trip_exact: bool,
    pub forward_ok: bool,
    pub backward_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub complex_a: String,
    pub complex_b: String,
    pub dim: usize,
    pub forward: OperatorBound,
    pub backward: OperatorBound,
    pub samples: Vec<EquivalenceSample>,
    pub skipped: Vec<String>,
    /// Largest `fill_b / fill_a` observed.
    pub max_ratio_forward: (u64, u64),
    /// Largest `fill_back / fill_b` observed.
    pub max_ratio_backward: (u64, u64),
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.samples.iter().all(|s| s.forward_ok && s.backward_ok)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceParams {
    pub dim: usize,
    pub samples: usize,
    pub radius_a: usize,
    pub radius_b: usize,
    /// Norm bound for the enumerated part of the sample.
    pub enumerate_k: u64,
    pub seed: u64,
}

/// Sampled `n`-cycles of a window: enumerated cycles of small norm
/// followed by boundaries of random `(n+1)`-chains, without repeats.
pub fn sample_cycles(w: &ComplexWindow, dim: usize, count: usize, enumerate_k: u64, seed: u64, caps: &Caps) -> Result<Vec<Chain>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    if enumerate_k > 0 {
        for z in enumerate_cycles(w, dim, enumerate_k, EnumerationMode::Exhaustive, caps)? {
            if out.len() >= count {
                break;
            }
            if seen.insert(z.clone().iter().collect::<Vec<_>>()) {
                out.push(z);
            }
        }
    }
    let fill_cells: Vec<usize> = (0..w.cell_count(dim + 1)).filter(|&i| !w.is_clipped(dim + 1, i)).collect();
    if fill_cells.is_empty() {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while out.len() < count && attempts < 50 * count {
        attempts += 1;
        let z = random_chain(&mut rng, dim + 1, &fill_cells, 3).boundary(w)?;
        if z.iter().any(|(i, _)| w.is_clipped(dim, i)) {
            continue;
        }
        if !z.is_zero() && seen.insert(z.iter().collect::<Vec<_>>()) {
            out.push(z);
        }
    }
    Ok(out)
}

fn window_fill(w: &ComplexWindow, z: Chain, caps: &Caps) -> Result<Option<u64>> {
    let inst = FillingInstance::new(w, z)?;
    Ok(fill_norm(&inst, caps)?.value)
}

/// Samples cycles in `A`, fills them in `A`, transports them to `B` and
/// back, and checks `‖φm‖_B ≤ C_AB ‖m‖_A` and `‖ψφm‖_A ≤ C_BA ‖φm‖_B`
/// with the operator bounds of the maps one dimension up.
pub fn check_norm_equivalence(
    map_ab: &Arc<ChainMapSpec>,
    map_ba: &Arc<ChainMapSpec>,
    params: EquivalenceParams,
    caps: &Caps,
) -> Result<EquivalenceReport> {
    let a = map_ab.source();
    let b = map_ab.target();
    if map_ba.source().label() != b.label() || map_ba.target().label() != a.label() {
        return Err(Error::MapValidation(format!(
            "`{}` and `{}` are not opposite maps",
            map_ab.label(),
            map_ba.label()
        )));
    }
    let n = params.dim;
    let forward = operator_bound(map_ab, n + 1)?;
    let backward = operator_bound(map_ba, n + 1)?;
    let wa = a.instantiate_window(params.radius_a, caps.max_ball_size)?;
    let wb = b.instantiate_window(params.radius_b, caps.max_ball_size)?;
    let cycles = sample_cycles(&wa, n, params.samples, params.enumerate_k, params.seed, caps)?;
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    let mut max_f = (0, 1);
    let mut max_b = (0, 1);
    for m in cycles {
        let lit = m.to_literal(&wa);
        let Some(fa) = window_fill(&wa, m.clone(), caps)? else {
            skipped.push(format!("{lit:?}: no filling in the first window"));
            continue;
        };
        let fm = map_ab.apply_formal(&m.to_formal(&wa))?;
        let fm_chain = match Chain::from_formal(&wb, n, &fm) {
            Ok(c) => c,
            Err(Error::WindowTooSmall(msg)) => {
                skipped.push(format!("{lit:?}: {msg}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        if !b.formal_boundary(&fm)?.is_zero() {
            return Err(Error::MapValidation(format!(
                "`{}` sends the cycle {:?} to a non-cycle",
                map_ab.label(),
                lit
            )));
        }
        let Some(fb) = window_fill(&wb, fm_chain, caps)? else {
            skipped.push(format!("{lit:?}: image has no filling in the second window"));
            continue;
        };
        let back = map_ba.apply_formal(&fm)?;
        let round_trip_exact = back == m.to_formal(&wa);
        let back_chain = match Chain::from_formal(&wa, n, &back) {
            Ok(c) => c,
            Err(Error::WindowTooSmall(msg)) => {
                skipped.push(format!("{lit:?}: {msg}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        if !round_trip_exact {
            let mut diff = back.clone();
            diff.add_chain(&m.to_formal(&wa), -1);
            let d = Chain::from_formal(&wa, n, &diff)?;
            if window_fill(&wa, d, caps)?.is_none() {
                return Err(Error::MapValidation(format!(
                    "round trip through `{}` changes the class of {:?}",
                    map_ab.label(),
                    lit
                )));
            }
        }
        let Some(fback) = window_fill(&wa, back_chain, caps)? else {
            skipped.push(format!("{lit:?}: round trip has no filling in the first window"));
            continue;
        };
        if fa > 0 && ratio_gt((fb, fa), max_f) {
            max_f = reduced(fb, fa);
        }
        if fb > 0 && ratio_gt((fback, fb), max_b) {
            max_b = reduced(fback, fb);
        }
        samples.push(EquivalenceSample {
            norm: m.l1_norm(),
            cycle: lit,
            fill_a: fa,
            fill_b: fb,
            fill_back: fback,
            round_trip_exact,
            forward_ok: fb <= forward.constant * fa,
            backward_ok: fback <= backward.constant * fb,
        });
    }
    Ok(EquivalenceReport {
        complex_a: a.label().to_string(),
        complex_b: b.label().to_string(),
        dim: n,
        forward,
        backward,
        samples,
        skipped,
        max_ratio_forward: max_f,
        max_ratio_backward: max_b,
    })
}
