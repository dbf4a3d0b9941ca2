//! Equivariant cell complexes given by orbit representatives, and finite
//! windows of their universal covers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupPresentation, Letter};

/// Formal ZG-chain: integer combination of cells `(orbit, g)`, with `g`
/// acting on the orbit representative.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormalChain(BTreeMap<(usize, GroupElement), i64>);

impl FormalChain {
    pub fn new() -> Self {
        FormalChain(BTreeMap::new())
    }

    pub fn cell(orbit: usize, g: GroupElement) -> Self {
        let mut c = FormalChain::new();
        c.add(orbit, g, 1);
        c
    }

    pub fn add(&mut self, orbit: usize, g: GroupElement, coef: i64) {
        if coef == 0 {
            return;
        }
        let key = (orbit, g);
        let e = self.0.entry(key.clone()).or_insert(0);
        *e += coef;
        if *e == 0 {
            self.0.remove(&key);
        }
    }

    pub fn add_chain(&mut self, other: &FormalChain, scale: i64) {
        for ((o, g), c) in &other.0 {
            self.add(*o, g.clone(), c * scale);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l1_norm(&self) -> u64 {
        self.0.values().map(|c| c.unsigned_abs()).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &GroupElement, i64)> {
        self.0.iter().map(|((o, g), c)| (*o, g, *c))
    }

    /// Left translate `h · c`.
    pub fn translate(&self, group: &GroupPresentation, h: &GroupElement) -> Result<FormalChain> {
        let mut out = FormalChain::new();
        for (o, g, c) in self.iter() {
            out.add(o, group.multiply(h, g)?, c);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryTerm {
    pub coef: i64,
    pub element: GroupElement,
    pub target: usize,
}

/// A G-orbit of cells, represented by one cell and its boundary formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellOrbit {
    pub id: String,
    pub dim: usize,
    pub boundary: Vec<BoundaryTerm>,
}

/// Orbit data as supplied by a builder, with boundary targets named by id.
#[derive(Clone, Debug)]
pub struct OrbitDraft {
    pub id: String,
    pub dim: usize,
    pub boundary: Vec<(i64, GroupElement, String)>,
}

impl OrbitDraft {
    pub fn new(id: &str, dim: usize) -> Self {
        OrbitDraft { id: id.to_string(), dim, boundary: Vec::new() }
    }

    pub fn term(mut self, coef: i64, g: GroupElement, target: &str) -> Self {
        self.boundary.push((coef, g, target.to_string()));
        self
    }
}

/// Finite set of cell orbits with ZG boundary formulas.
#[derive(Clone, Debug)]
pub struct ComplexSpec {
    label: String,
    group: Arc<GroupPresentation>,
    orbits: Vec<CellOrbit>,
    top_dim: usize,
}

impl ComplexSpec {
    /// Validates orbit references and dimensions, combines repeated boundary
    /// terms, and checks ∂∘∂ = 0 on the orbit formulas.
    pub fn new(label: &str, group: Arc<GroupPresentation>, drafts: Vec<OrbitDraft>) -> Result<Self> {
        if drafts.is_empty() {
            return Err(Error::InvalidComplex(format!("`{label}` has no cells")));
        }
        let mut ids: HashMap<&str, usize> = HashMap::new();
        for (i, d) in drafts.iter().enumerate() {
            if ids.insert(d.id.as_str(), i).is_some() {
                return Err(Error::InvalidComplex(format!("duplicate orbit id `{}`", d.id)));
            }
        }
        let top_dim = drafts.iter().map(|d| d.dim).max().unwrap_or(0);
        for dim in 0..=top_dim {
            if !drafts.iter().any(|d| d.dim == dim) {
                return Err(Error::InvalidComplex(format!(
                    "`{label}` has no cells in dimension {dim} (dimensions must be contiguous from 0)"
                )));
            }
        }
        let mut orbits = Vec::with_capacity(drafts.len());
        for d in &drafts {
            let mut combined: BTreeMap<(usize, GroupElement), i64> = BTreeMap::new();
            for (coef, g, target) in &d.boundary {
                let &t = ids.get(target.as_str()).ok_or_else(|| {
                    Error::InvalidComplex(format!("orbit `{}` references unknown orbit `{target}`", d.id))
                })?;
                if d.dim == 0 || drafts[t].dim + 1 != d.dim {
                    return Err(Error::InvalidComplex(format!(
                        "orbit `{}` (dim {}) has a boundary term on `{target}` (dim {})",
                        d.id, d.dim, drafts[t].dim
                    )));
                }
                *combined.entry((t, g.clone())).or_insert(0) += coef;
            }
            let boundary = combined
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|((target, element), coef)| BoundaryTerm { coef, element, target })
                .collect();
            orbits.push(CellOrbit { id: d.id.clone(), dim: d.dim, boundary });
        }
        let spec = ComplexSpec { label: label.to_string(), group, orbits, top_dim };
        spec.check_boundary_squared()?;
        Ok(spec)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn group(&self) -> &Arc<GroupPresentation> {
        &self.group
    }

    pub fn orbits(&self) -> &[CellOrbit] {
        &self.orbits
    }

    pub fn top_dim(&self) -> usize {
        self.top_dim
    }

    pub fn orbit_index(&self, id: &str) -> Option<usize> {
        self.orbits.iter().position(|o| o.id == id)
    }

    pub fn orbits_in_dim(&self, dim: usize) -> impl Iterator<Item = usize> + '_ {
        self.orbits.iter().enumerate().filter(move |(_, o)| o.dim == dim).map(|(i, _)| i)
    }

    pub fn orbit_count(&self, dim: usize) -> usize {
        self.orbits_in_dim(dim).count()
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// Boundary of a formal chain, computed from the orbit formulas.
    pub fn formal_boundary(&self, c: &FormalChain) -> Result<FormalChain> {
        let mut out = FormalChain::new();
        for (o, g, coef) in c.iter() {
            for t in &self.orbits[o].boundary {
                out.add(t.target, self.group.multiply(g, &t.element)?, coef * t.coef);
            }
        }
        Ok(out)
    }

    fn check_boundary_squared(&self) -> Result<()> {
        for (i, o) in self.orbits.iter().enumerate() {
            if o.dim < 2 {
                continue;
            }
            let bb = self.formal_boundary(&self.formal_boundary(&FormalChain::cell(i, GroupElement::identity()))?)?;
            if !bb.is_zero() {
                return Err(Error::SpecConsistency(format!(
                    "orbit `{}` of `{}`: ∂∂ has {} nonzero term(s)",
                    o.id,
                    self.label,
                    bb.len()
                )));
            }
        }
        Ok(())
    }

    fn fresh_id(&self, base: &str) -> String {
        if self.orbit_index(base).is_none() {
            return base.to_string();
        }
        (1..).map(|i| format!("{base}_{i}")).find(|id| self.orbit_index(id).is_none()).expect("unbounded")
    }

    fn drafts(&self) -> Vec<OrbitDraft> {
        self.orbits
            .iter()
            .map(|o| OrbitDraft {
                id: o.id.clone(),
                dim: o.dim,
                boundary: o
                    .boundary
                    .iter()
                    .map(|t| (t.coef, t.element.clone(), self.orbits[t.target].id.clone()))
                    .collect(),
            })
            .collect()
    }

    /// Wedges an `n`-sphere onto the complex and caps it with an
    /// `(n+1)`-cell, so that the n-cycles gain a free summand generated by
    /// the translates of the new sphere.
    pub fn eilenberg_trick(&self, n: usize) -> Result<ComplexSpec> {
        if n == 0 {
            return Err(Error::InvalidInput("Eilenberg trick needs n >= 1".into()));
        }
        if n > self.top_dim + 1 {
            return Err(Error::InvalidInput(format!(
                "cannot add an {n}-sphere to a complex of dimension {}",
                self.top_dim
            )));
        }
        let sphere = self.fresh_id(&format!("sphere{n}"));
        let cap = self.fresh_id(&format!("cap{}", n + 1));
        let mut drafts = self.drafts();
        drafts.push(OrbitDraft::new(&sphere, n));
        drafts.push(OrbitDraft::new(&cap, n + 1).term(1, GroupElement::identity(), &sphere));
        ComplexSpec::new(&format!("{}+S{n}", self.label), self.group.clone(), drafts)
    }

    /// Instantiates all cells anchored in the ball of radius `radius`.
    pub fn instantiate_window(self: &Arc<Self>, radius: usize, max_ball: usize) -> Result<ComplexWindow> {
        ComplexWindow::new(self.clone(), radius, max_ball)
    }
}

/// Standard 2-complex of a presentation: one vertex, an edge per
/// generator, and a 2-cell per relator whose boundary is the Fox-derivative
/// edge word of the relator.
pub fn build_presentation_complex(p: Arc<GroupPresentation>) -> Result<ComplexSpec> {
    let drafts = presentation_drafts(&p, |w| p.reduce_word(w))?;
    ComplexSpec::new(&format!("{}-complex", p.name()), p.clone(), drafts)
}

/// The same cell structure with the trivial group acting, i.e. the chain
/// complex of the presentation complex itself rather than of its cover.
pub fn build_quotient_complex(p: &GroupPresentation) -> Result<ComplexSpec> {
    let drafts = presentation_drafts(p, |_| Ok(GroupElement::identity()))?;
    ComplexSpec::new(&format!("{}-quotient", p.name()), Arc::new(GroupPresentation::trivial()), drafts)
}

pub fn edge_orbit_id(p: &GroupPresentation, generator: usize) -> String {
    format!("e{}", p.generators()[generator].name)
}

fn presentation_drafts(
    p: &GroupPresentation,
    element: impl Fn(&[Letter]) -> Result<GroupElement>,
) -> Result<Vec<OrbitDraft>> {
    let mut drafts = vec![OrbitDraft::new("v", 0)];
    for (i, _) in p.generators().iter().enumerate() {
        let a = Letter::new(i, false);
        drafts.push(
            OrbitDraft::new(&edge_orbit_id(p, i), 1)
                .term(1, element(&[a])?, "v")
                .term(-1, GroupElement::identity(), "v"),
        );
    }
    for (j, r) in p.relators().iter().enumerate() {
        if r.is_empty() {
            return Err(Error::InvalidComplex(format!("relator {j} of `{}` is empty", p.name())));
        }
        let mut d = OrbitDraft::new(&format!("r{j}"), 2);
        for (i, &l) in r.iter().enumerate() {
            let edge = edge_orbit_id(p, l.generator as usize);
            if l.inverse {
                d = d.term(-1, element(&r[..=i])?, &edge);
            } else {
                d = d.term(1, element(&r[..i])?, &edge);
            }
        }
        drafts.push(d);
    }
    Ok(drafts)
}

/// A cell of a window: orbit index and anchoring group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub orbit: usize,
    pub element: GroupElement,
}

/// Boundary term of a window cell whose target lies outside the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClippedTerm {
    pub dim: usize,
    pub cell: usize,
    pub coef: i64,
    pub target: Cell,
}

/// Cells anchored in a word-metric ball, with integer boundary matrices.
///
/// Cells of each dimension are indexed in (orbit id, shortlex) order.
/// `boundary[d][i]` lists `(row, coef)` pairs in dimension `d - 1`.
#[derive(Clone, Debug)]
pub struct ComplexWindow {
    spec: Arc<ComplexSpec>,
    radius: usize,
    ball: crate::group::Ball,
    cells: Vec<Vec<Cell>>,
    index: Vec<HashMap<Cell, usize>>,
    boundary: Vec<Vec<Vec<(usize, i64)>>>,
    clipped: Vec<Vec<bool>>,
    clipped_terms: Vec<ClippedTerm>,
    dd_checked: usize,
}

impl ComplexWindow {
    pub fn new(spec: Arc<ComplexSpec>, radius: usize, max_ball: usize) -> Result<Self> {
        let group = spec.group().clone();
        let ball = group.ball_enumerate(radius, max_ball)?;
        let top = spec.top_dim();
        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); top + 1];
        for dim in 0..=top {
            let mut orbits: Vec<usize> = spec.orbits_in_dim(dim).collect();
            orbits.sort_by(|&a, &b| spec.orbits()[a].id.cmp(&spec.orbits()[b].id));
            for o in orbits {
                for g in &ball.elements {
                    cells[dim].push(Cell { orbit: o, element: g.clone() });
                }
            }
        }
        let index: Vec<HashMap<Cell, usize>> = cells
            .iter()
            .map(|cs| cs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect())
            .collect();

        let mut boundary = vec![Vec::new(); top + 1];
        let mut clipped = vec![Vec::new(); top + 1];
        let mut clipped_terms = Vec::new();
        for dim in 0..=top {
            boundary[dim] = Vec::with_capacity(cells[dim].len());
            clipped[dim] = vec![false; cells[dim].len()];
            for (i, cell) in cells[dim].iter().enumerate() {
                let mut col = Vec::new();
                for t in &spec.orbits()[cell.orbit].boundary {
                    let target = Cell { orbit: t.target, element: group.multiply(&cell.element, &t.element)? };
                    match index[dim - 1].get(&target) {
                        Some(&row) => col.push((row, t.coef)),
                        None => {
                            clipped[dim][i] = true;
                            clipped_terms.push(ClippedTerm { dim, cell: i, coef: t.coef, target });
                        }
                    }
                }
                col.sort_unstable();
                boundary[dim].push(col);
            }
        }
        let mut w = ComplexWindow {
            spec,
            radius,
            ball,
            cells,
            index,
            boundary,
            clipped,
            clipped_terms,
            dd_checked: 0,
        };
        w.dd_checked = w.verify_boundary_squared()?;
        Ok(w)
    }

    // Checks ∂∂ = 0 on every cell whose boundary and second boundary are
    // fully inside the window; returns the number of cells checked.
    fn verify_boundary_squared(&self) -> Result<usize> {
        let mut checked = 0;
        for dim in 2..=self.top_dim() {
            for i in 0..self.cells[dim].len() {
                if self.clipped[dim][i] || self.boundary[dim][i].iter().any(|&(r, _)| self.clipped[dim - 1][r]) {
                    continue;
                }
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for &(r, c) in &self.boundary[dim][i] {
                    for &(s, d) in &self.boundary[dim - 1][r] {
                        *acc.entry(s).or_insert(0) += c * d;
                    }
                }
                if acc.values().any(|&v| v != 0) {
                    return Err(Error::SpecConsistency(format!(
                        "∂∂ ≠ 0 at cell {} of window radius {}",
                        self.describe_cell(dim, i),
                        self.radius
                    )));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    pub fn spec(&self) -> &Arc<ComplexSpec> {
        &self.spec
    }

    pub fn group(&self) -> &Arc<GroupPresentation> {
        self.spec.group()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn ball(&self) -> &crate::group::Ball {
        &self.ball
    }

    pub fn top_dim(&self) -> usize {
        self.spec.top_dim()
    }

    pub fn cells(&self, dim: usize) -> &[Cell] {
        self.cells.get(dim).map(|c| c.as_slice()).unwrap_or(&[])
    }

    pub fn cell_count(&self, dim: usize) -> usize {
        self.cells(dim).len()
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }

    pub fn cell(&self, dim: usize, i: usize) -> &Cell {
        &self.cells[dim][i]
    }

    pub fn cell_index(&self, dim: usize, cell: &Cell) -> Option<usize> {
        self.index.get(dim)?.get(cell).copied()
    }

    /// Boundary column of cell `i` (entries in dimension `dim - 1`). Terms
    /// falling outside the window are not included; check [`Self::is_clipped`].
    pub fn boundary_column(&self, dim: usize, i: usize) -> &[(usize, i64)] {
        if dim == 0 {
            return &[];
        }
        &self.boundary[dim][i]
    }

    pub fn is_clipped(&self, dim: usize, i: usize) -> bool {
        self.clipped.get(dim).map(|c| c[i]).unwrap_or(false)
    }

    pub fn clipped_terms(&self) -> &[ClippedTerm] {
        &self.clipped_terms
    }

    /// Number of cells on which ∂∂ = 0 was verified during instantiation.
    pub fn boundary_squared_checked(&self) -> usize {
        self.dd_checked
    }

    pub fn describe_cell(&self, dim: usize, i: usize) -> String {
        let c = &self.cells[dim][i];
        format!("({}, {})", self.spec.orbits()[c.orbit].id, self.display_element(&c.element))
    }

    pub fn display_element(&self, g: &GroupElement) -> String {
        if g.is_identity() {
            "e".to_string()
        } else {
            self.group().format(g)
        }
    }

    pub fn word_length(&self, g: &GroupElement) -> Option<usize> {
        self.ball.word_length(g)
    }

    /// Index of the translate `h · cell`, if it is in the window.
    pub fn translate_cell(&self, dim: usize, i: usize, h: &GroupElement) -> Result<Option<usize>> {
        let c = &self.cells[dim][i];
        let moved = Cell { orbit: c.orbit, element: self.group().multiply(h, &c.element)? };
        Ok(self.cell_index(dim, &moved))
    }
}

impl fmt::Display for ComplexWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} window r={} cells {:?}", self.spec.label(), self.radius, self.cell_counts())
    }
}
