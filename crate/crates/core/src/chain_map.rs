//! Equivariant chain maps between complexes, given on orbit
//! representatives together with a group homomorphism.

use std::sync::Arc;

use crate::chain::Chain;
use crate::complex::{ComplexSpec, ComplexWindow, FormalChain};
use crate::error::{Error, Result};
use crate::group::GroupElement;

/// A chain map `source → target`, equivariant along `group_map`.
/// `images[o]` is the image of the identity-anchored cell of orbit `o`.
#[derive(Clone, Debug)]
pub struct ChainMapSpec {
    label: String,
    source: Arc<ComplexSpec>,
    target: Arc<ComplexSpec>,
    group_map: Vec<GroupElement>,
    images: Vec<FormalChain>,
}

impl ChainMapSpec {
    /// Validates dimensions, the homomorphism on relators, and the
    /// commuting square `∂φ = φ∂` on every orbit representative.
    pub fn new(
        label: &str,
        source: Arc<ComplexSpec>,
        target: Arc<ComplexSpec>,
        group_map: Vec<GroupElement>,
        images: Vec<FormalChain>,
    ) -> Result<Self> {
        let sg = source.group();
        if group_map.len() != sg.generators().len() {
            return Err(Error::MapValidation(format!(
                "`{label}`: group map has {} images for {} generators",
                group_map.len(),
                sg.generators().len()
            )));
        }
        if images.len() != source.orbits().len() {
            return Err(Error::MapValidation(format!(
                "`{label}`: {} orbit images for {} orbits",
                images.len(),
                source.orbits().len()
            )));
        }
        let map = ChainMapSpec { label: label.to_string(), source, target, group_map, images };
        for (j, r) in map.source.group().relators().iter().enumerate() {
            let img = map.map_word(r)?;
            if !img.is_identity() {
                return Err(Error::MapValidation(format!(
                    "`{label}`: relator {j} maps to {} rather than the identity",
                    map.target.group().format(&img)
                )));
            }
        }
        for rule in map.source.group().rules() {
            if map.map_word(&rule.lhs)? != map.map_word(&rule.rhs)? {
                return Err(Error::MapValidation(format!(
                    "`{label}`: rewrite rule {} -> {} is not respected",
                    map.source.group().format_word(&rule.lhs),
                    map.source.group().format_word(&rule.rhs)
                )));
            }
        }
        for (o, orbit) in map.source.orbits().iter().enumerate() {
            for (t, _, _) in map.images[o].iter() {
                if map.target.orbits()[t].dim != orbit.dim {
                    return Err(Error::MapValidation(format!(
                        "`{label}`: image of `{}` contains `{}` of another dimension",
                        orbit.id,
                        map.target.orbits()[t].id
                    )));
                }
            }
            if orbit.dim == 0 {
                continue;
            }
            let cell = FormalChain::cell(o, GroupElement::identity());
            let lhs = map.target.formal_boundary(&map.images[o])?;
            let rhs = map.apply_formal(&map.source.formal_boundary(&cell)?)?;
            if lhs != rhs {
                return Err(Error::MapValidation(format!(
                    "`{label}`: ∂φ ≠ φ∂ on orbit `{}`",
                    orbit.id
                )));
            }
        }
        Ok(map)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn source(&self) -> &Arc<ComplexSpec> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ComplexSpec> {
        &self.target
    }

    pub fn group_map(&self) -> &[GroupElement] {
        &self.group_map
    }

    pub fn image(&self, orbit: usize) -> &FormalChain {
        &self.images[orbit]
    }

    fn map_word(&self, w: &[crate::group::Letter]) -> Result<GroupElement> {
        let tg = self.target.group();
        let mut out = GroupElement::identity();
        for l in w {
            let img = &self.group_map[l.generator as usize];
            let img = if l.inverse { tg.inverse(img)? } else { img.clone() };
            out = tg.multiply(&out, &img)?;
        }
        Ok(out)
    }

    pub fn map_element(&self, g: &GroupElement) -> Result<GroupElement> {
        self.map_word(g.letters())
    }

    pub fn apply_formal(&self, c: &FormalChain) -> Result<FormalChain> {
        let mut out = FormalChain::new();
        for (o, g, coef) in c.iter() {
            let h = self.map_element(g)?;
            out.add_chain(&self.images[o].translate(self.target.group(), &h)?, coef);
        }
        Ok(out)
    }

    /// Image of a window chain in a target window.
    pub fn apply(&self, src: &ComplexWindow, c: &Chain, dst: &ComplexWindow) -> Result<Chain> {
        self.check_windows(src, dst)?;
        Chain::from_formal(dst, c.dim(), &self.apply_formal(&c.to_formal(src))?)
    }

    fn check_windows(&self, src: &ComplexWindow, dst: &ComplexWindow) -> Result<()> {
        if !Arc::ptr_eq(src.spec(), &self.source) && src.spec().label() != self.source.label() {
            return Err(Error::InvalidInput(format!(
                "`{}` expects source `{}`, got `{}`",
                self.label,
                self.source.label(),
                src.spec().label()
            )));
        }
        if !Arc::ptr_eq(dst.spec(), &self.target) && dst.spec().label() != self.target.label() {
            return Err(Error::InvalidInput(format!(
                "`{}` expects target `{}`, got `{}`",
                self.label,
                self.target.label(),
                dst.spec().label()
            )));
        }
        Ok(())
    }

    /// ℓ1 norm of the image of each orbit representative in `dim`.
    pub fn basis_norms(&self, dim: usize) -> Vec<(String, u64)> {
        self.source
            .orbits_in_dim(dim)
            .map(|o| (self.source.orbits()[o].id.clone(), self.images[o].l1_norm()))
            .collect()
    }

    /// Instantiates the map between two windows.
    pub fn instantiate(self: &Arc<Self>, src: &ComplexWindow, dst: &ComplexWindow) -> Result<ChainMap> {
        self.check_windows(src, dst)?;
        let top = self.source.top_dim();
        let mut columns = Vec::with_capacity(top + 1);
        for dim in 0..=top {
            let mut cols = Vec::with_capacity(src.cell_count(dim));
            for i in 0..src.cell_count(dim) {
                let img = Chain::from_formal(dst, dim, &self.apply_formal(&Chain::from_terms(dim, [(i, 1)]).to_formal(src))?);
                cols.push(img.ok().map(|c| c.iter().collect::<Vec<_>>()));
            }
            columns.push(cols);
        }
        Ok(ChainMap { spec: self.clone(), columns })
    }
}

/// A chain map instantiated between two windows. Columns are `None` for
/// source cells whose image leaves the target window.
#[derive(Clone, Debug)]
pub struct ChainMap {
    spec: Arc<ChainMapSpec>,
    columns: Vec<Vec<Option<Vec<(usize, i64)>>>>,
}

impl ChainMap {
    pub fn spec(&self) -> &Arc<ChainMapSpec> {
        &self.spec
    }

    pub fn column(&self, dim: usize, i: usize) -> Option<&[(usize, i64)]> {
        self.columns.get(dim)?.get(i)?.as_deref()
    }

    pub fn apply(&self, c: &Chain) -> Result<Chain> {
        let mut out = Chain::zero(c.dim());
        for (i, coef) in c.iter() {
            let col = self.column(c.dim(), i).ok_or_else(|| {
                Error::WindowTooSmall(format!("image of source cell {i} in dimension {} leaves the target window", c.dim()))
            })?;
            for &(r, v) in col {
                out.add_term(r, coef * v);
            }
        }
        Ok(out)
    }

    /// Checks `∂φ(c) = φ(∂c)` for every source cell whose boundary and
    /// both images are fully in the windows. Returns the number of cells
    /// checked.
    pub fn verify_commutes(&self, src: &ComplexWindow, dst: &ComplexWindow) -> Result<usize> {
        let mut checked = 0;
        for dim in 1..self.columns.len() {
            for i in 0..src.cell_count(dim) {
                if src.is_clipped(dim, i) {
                    continue;
                }
                let Some(col) = self.column(dim, i) else { continue };
                let img = Chain::from_terms(dim, col.iter().copied());
                if img.iter().any(|(j, _)| dst.is_clipped(dim, j)) {
                    continue;
                }
                let lower = Chain::from_terms(dim, [(i, 1)]).boundary(src)?;
                let Ok(down) = self.apply(&lower) else { continue };
                if img.boundary(dst)? != down {
                    return Err(Error::MapValidation(format!(
                        "`{}`: ∂φ ≠ φ∂ at {}",
                        self.spec.label(),
                        src.describe_cell(dim, i)
                    )));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }
}
