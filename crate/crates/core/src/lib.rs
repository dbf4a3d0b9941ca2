//! Exact filling norms and filling-volume functions on finite windows of
//! equivariant cell complexes.
//!
//! A [`group::GroupPresentation`] with a rewriting system supplies normal
//! forms; a [`complex::ComplexSpec`] lists cell orbits with ZG boundary
//! formulas; a [`complex::ComplexWindow`] instantiates the cells anchored in
//! a word-metric ball. Filling norms are solved exactly by
//! [`fill::fill_norm`] and assembled into tables by [`fv::fv_table`].

pub mod bounds;
pub mod builtins;
pub mod chain;
pub mod chain_map;
pub mod clock;
pub mod complex;
pub mod config;
pub mod document;
pub mod enumerate;
pub mod error;
pub mod fill;
pub mod fv;
pub mod group;
pub mod lattice;
pub mod lp;
pub mod report;
pub mod subgroup;

pub use error::{Error, ErrorKind, Result};
