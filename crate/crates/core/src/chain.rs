//! Sparse integer chains on a window.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{Cell, ComplexWindow, FormalChain};
use crate::error::{Error, Result};
use crate::group::GroupElement;

/// Integer chain of dimension `dim`, keyed by cell index in a window.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Chain {
    dim: usize,
    coeffs: BTreeMap<usize, i64>,
}

impl Chain {
    pub fn zero(dim: usize) -> Self {
        Chain { dim, coeffs: BTreeMap::new() }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut c = Chain::zero(dim);
        for (i, v) in terms {
            c.add_term(i, v);
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, cell: usize, coef: i64) {
        if coef == 0 {
            return;
        }
        let e = self.coeffs.entry(cell).or_insert(0);
        *e += coef;
        if *e == 0 {
            self.coeffs.remove(&cell);
        }
    }

    pub fn coef(&self, cell: usize) -> i64 {
        self.coeffs.get(&cell).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs.iter().map(|(&i, &c)| (i, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sum of absolute coefficients.
    pub fn l1_norm(&self) -> u64 {
        self.coeffs.values().map(|c| c.unsigned_abs()).sum()
    }

    pub fn scale(&self, n: i64) -> Chain {
        Chain::from_terms(self.dim, self.iter().map(|(i, c)| (i, c * n)))
    }

    fn check_dim(&self, other: &Chain) {
        assert_eq!(self.dim, other.dim, "adding chains of different dimensions");
    }

    /// Boundary in the window. Fails if any support cell has a boundary
    /// term outside the window.
    pub fn boundary(&self, w: &ComplexWindow) -> Result<Chain> {
        if self.dim == 0 {
            return Ok(Chain::zero(0));
        }
        let mut out = Chain::zero(self.dim - 1);
        for (i, c) in self.iter() {
            if w.is_clipped(self.dim, i) {
                return Err(Error::WindowTooSmall(format!(
                    "cell {} has boundary outside radius {}",
                    w.describe_cell(self.dim, i),
                    w.radius()
                )));
            }
            for &(r, d) in w.boundary_column(self.dim, i) {
                out.add_term(r, c * d);
            }
        }
        Ok(out)
    }

    pub fn is_cycle(&self, w: &ComplexWindow) -> Result<bool> {
        Ok(self.boundary(w)?.is_zero())
    }

    /// Left translate `h · c`; fails if a translated cell leaves the window.
    pub fn translate(&self, w: &ComplexWindow, h: &GroupElement) -> Result<Chain> {
        let mut out = Chain::zero(self.dim);
        for (i, c) in self.iter() {
            let j = w.translate_cell(self.dim, i, h)?.ok_or_else(|| {
                Error::WindowTooSmall(format!(
                    "translate of {} by {} leaves radius {}",
                    w.describe_cell(self.dim, i),
                    w.display_element(h),
                    w.radius()
                ))
            })?;
            out.add_term(j, c);
        }
        Ok(out)
    }

    pub fn to_formal(&self, w: &ComplexWindow) -> FormalChain {
        let mut f = FormalChain::new();
        for (i, c) in self.iter() {
            let cell = w.cell(self.dim, i);
            f.add(cell.orbit, cell.element.clone(), c);
        }
        f
    }

    pub fn from_formal(w: &ComplexWindow, dim: usize, f: &FormalChain) -> Result<Chain> {
        let mut out = Chain::zero(dim);
        for (o, g, c) in f.iter() {
            if w.spec().orbits()[o].dim != dim {
                return Err(Error::InvalidInput(format!(
                    "orbit `{}` is not {dim}-dimensional",
                    w.spec().orbits()[o].id
                )));
            }
            let cell = Cell { orbit: o, element: g.clone() };
            let i = w.cell_index(dim, &cell).ok_or_else(|| {
                Error::WindowTooSmall(format!(
                    "cell ({}, {}) is outside radius {}",
                    w.spec().orbits()[o].id,
                    w.display_element(g),
                    w.radius()
                ))
            })?;
            out.add_term(i, c);
        }
        Ok(out)
    }

    /// Distinct anchoring elements of the support.
    pub fn anchors(&self, w: &ComplexWindow) -> Vec<GroupElement> {
        let mut v: Vec<GroupElement> = self.iter().map(|(i, _)| w.cell(self.dim, i).element.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Serializable `[coef, orbit_id, word]` triples.
    pub fn to_literal(&self, w: &ComplexWindow) -> ChainLiteral {
        formal_to_literal(w.spec(), &self.to_formal(w))
    }
}

impl Add for &Chain {
    type Output = Chain;
    fn add(self, rhs: &Chain) -> Chain {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (i, c) in rhs.iter() {
            out.add_term(i, c);
        }
        out
    }
}

impl Sub for &Chain {
    type Output = Chain;
    fn sub(self, rhs: &Chain) -> Chain {
        self + &(-rhs)
    }
}

impl Neg for &Chain {
    type Output = Chain;
    fn neg(self) -> Chain {
        self.scale(-1)
    }
}

/// Chain literal: list of `[coef, orbit_id, word]` triples.
pub type ChainLiteral = Vec<LiteralTerm>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteralTerm(pub i64, pub String, pub String);

pub fn formal_to_literal(spec: &crate::complex::ComplexSpec, f: &FormalChain) -> ChainLiteral {
    f.iter()
        .map(|(o, g, c)| LiteralTerm(c, spec.orbits()[o].id.clone(), spec.group().format(g)))
        .collect()
}

pub fn literal_to_formal(spec: &crate::complex::ComplexSpec, lit: &[LiteralTerm]) -> Result<FormalChain> {
    let mut f = FormalChain::new();
    for LiteralTerm(c, id, word) in lit {
        let o = spec
            .orbit_index(id)
            .ok_or_else(|| Error::InvalidInput(format!("unknown orbit `{id}` in chain literal")))?;
        let g = spec.group().element(word)?;
        f.add(o, g, *c);
    }
    Ok(f)
}

/// Parses a literal into a chain of the given window. All terms must have
/// the same dimension.
pub fn chain_from_literal(w: &ComplexWindow, lit: &[LiteralTerm]) -> Result<Chain> {
    let f = literal_to_formal(w.spec(), lit)?;
    let dim = match f.iter().next() {
        Some((o, _, _)) => w.spec().orbits()[o].dim,
        None => return Err(Error::InvalidInput("empty chain literal has no dimension".into())),
    };
    Chain::from_formal(w, dim, &f)
}

/// Translation-invariant ordering key: support sorted by (element, orbit).
pub type TranslationKey = Vec<(GroupElement, usize, i64)>;

fn key_of(f: &FormalChain) -> TranslationKey {
    let mut k: TranslationKey = f.iter().map(|(o, g, c)| (g.clone(), o, c)).collect();
    k.sort();
    k
}

/// All translates `g⁻¹ · c` for anchors `g` of the support, with their keys.
fn anchored_translates(w: &ComplexWindow, c: &Chain) -> Result<Vec<(GroupElement, FormalChain, TranslationKey)>> {
    let group = w.group();
    let f = c.to_formal(w);
    let mut out = Vec::new();
    for g in c.anchors(w) {
        let h = group.inverse(&g)?;
        let t = f.translate(group, &h)?;
        let key = key_of(&t);
        out.push((h, t, key));
    }
    Ok(out)
}

/// Canonical representative of the translation class of `c`: the translate
/// bringing an anchor of the support to the identity whose key is least.
/// Returns the key along with the chain.
pub fn canonical_key(w: &ComplexWindow, c: &Chain) -> Result<(TranslationKey, FormalChain)> {
    if c.is_zero() {
        return Err(Error::InvalidInput("canonical translate of the zero chain".into()));
    }
    let best = anchored_translates(w, c)?
        .into_iter()
        .min_by(|a, b| a.2.cmp(&b.2))
        .expect("nonzero chain has anchors");
    Ok((best.2, best.1))
}

pub fn canonical_translate(w: &ComplexWindow, c: &Chain) -> Result<Chain> {
    let (_, f) = canonical_key(w, c)?;
    Chain::from_formal(w, c.dim(), &f)
}

/// Translate of `c` (among those anchoring a support element at the
/// identity) whose farthest anchor is closest to the identity, restricted
/// to translates lying in `target` with no clipped cells. Ties break by key.
pub fn centered_translate(w: &ComplexWindow, c: &Chain, target: &ComplexWindow) -> Result<Chain> {
    let mut best: Option<(usize, TranslationKey, Chain)> = None;
    for (_, f, key) in anchored_translates(w, c)? {
        let Ok(moved) = Chain::from_formal(target, c.dim(), &f) else { continue };
        if moved.iter().any(|(i, _)| target.is_clipped(c.dim(), i)) {
            continue;
        }
        let spread = f.iter().map(|(_, g, _)| target.word_length(g).unwrap_or(usize::MAX)).max().unwrap_or(0);
        let better = match &best {
            None => true,
            Some((s, k, _)) => (spread, &key) < (*s, k),
        };
        if better {
            best = Some((spread, key, moved));
        }
    }
    best.map(|b| b.2).ok_or_else(|| {
        Error::WindowTooSmall(format!("no translate of the chain fits radius {}", target.radius()))
    })
}

/// Rank of the n-cycles supported on cells whose boundary lies in the
/// window, computed by exact rational elimination.
pub fn cycle_rank(w: &ComplexWindow, dim: usize) -> usize {
    let cols: Vec<usize> = (0..w.cell_count(dim)).filter(|&i| !w.is_clipped(dim, i)).collect();
    if dim == 0 {
        return cols.len();
    }
    let matrix: Vec<Vec<(usize, i64)>> = cols.iter().map(|&i| w.boundary_column(dim, i).to_vec()).collect();
    cols.len() - rational_rank(&matrix, w.cell_count(dim - 1))
}

/// Rank of a sparse integer matrix given column-wise.
pub fn rational_rank(columns: &[Vec<(usize, i64)>], rows: usize) -> usize {
    let mut pivots: BTreeMap<usize, Vec<BigRational>> = BTreeMap::new();
    let mut rank = 0;
    for col in columns {
        let mut v = vec![BigRational::zero(); rows];
        for &(r, c) in col {
            v[r] += BigRational::from_integer(c.into());
        }
        loop {
            let Some(lead) = v.iter().position(|x| !x.is_zero()) else { break };
            match pivots.get(&lead) {
                Some(p) => {
                    let f = &v[lead] / &p[lead];
                    for (a, b) in v.iter_mut().zip(p.iter()) {
                        if !b.is_zero() {
                            *a -= &f * b;
                        }
                    }
                }
                None => {
                    let inv = BigRational::one() / &v[lead];
                    for a in v.iter_mut() {
                        *a *= &inv;
                    }
                    debug_assert!(v[lead].is_positive());
                    pivots.insert(lead, v);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}
