//! JSON documents for presentations, complexes and chain maps.
//!
//! A reference to a document is either a built-in name or a path ending in
//! `.json` (or containing a path separator), resolved relative to the
//! directory of the referring document.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::builtins;
use crate::chain::{literal_to_formal, LiteralTerm};
use crate::chain_map::ChainMapSpec;
use crate::complex::{ComplexSpec, FormalChain, OrbitDraft};
use crate::error::{Error, ErrorKind, Result};
use crate::group::{Generator, GroupPresentation, ReductionOrder};

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub version: u32,
    pub name: String,
    pub generators: Vec<(String, String)>,
    #[serde(default)]
    pub relators: Vec<String>,
    #[serde(default)]
    pub rewrite_rules: Vec<(String, String)>,
    #[serde(default)]
    pub order: ReductionOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitDoc {
    pub id: String,
    pub dim: usize,
    #[serde(default)]
    pub boundary: Vec<(i64, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub version: u32,
    pub label: String,
    /// Built-in presentation name, `"trivial"`, or a presentation document.
    pub group: String,
    pub orbits: Vec<OrbitDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainMapDoc {
    pub version: u32,
    pub label: String,
    pub source: String,
    pub target: String,
    /// Image word in the target group of each source generator.
    #[serde(default)]
    pub group_map: BTreeMap<String, String>,
    /// Image of each source orbit; missing orbits map to zero.
    pub images: BTreeMap<String, Vec<LiteralTerm>>,
}

fn doc_error(path: &str, field: &str, reason: impl Into<String>) -> Error {
    Error::Document { path: path.to_string(), field: field.to_string(), reason: reason.into() }
}

// Validation errors become document errors naming the field; consistency
// and resource errors keep their kind.
fn at_field(path: &str, field: &str, e: Error) -> Error {
    match (e.kind(), &e) {
        (_, Error::Document { .. }) => e,
        (ErrorKind::Validation, _) => doc_error(path, field, e.to_string()),
        (_, Error::SpecConsistency(msg)) => Error::SpecConsistency(format!("{path}: {msg}")),
        _ => e,
    }
}

/// Parses a JSON document, reporting the path of any offending field, and
/// checks the version.
pub fn parse_document<T: DeserializeOwned>(path: &str, text: &str) -> Result<T> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| doc_error(path, "", format!("invalid JSON: {e}")))?;
    match value.get("version") {
        Some(v) if v.as_u64() == Some(DOCUMENT_VERSION as u64) => {}
        Some(v) => return Err(doc_error(path, "version", format!("unsupported version {v}, expected {DOCUMENT_VERSION}"))),
        None => return Err(doc_error(path, "version", "missing")),
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let field = e.path().to_string();
        let field = if field == "." { String::new() } else { field };
        doc_error(path, &field, e.into_inner().to_string())
    })
}

pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| doc_error(&shown, "", format!("cannot read: {e}")))?;
    parse_document(&shown, &text)
}

pub fn is_path_reference(reference: &str) -> bool {
    reference.ends_with(".json") || reference.contains('/') || reference.contains('\\')
}

fn resolve(reference: &str, base: &Path) -> PathBuf {
    let p = Path::new(reference);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn parent(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn presentation_from_doc(doc: &PresentationDoc, path: &str) -> Result<GroupPresentation> {
    let gens: Vec<Generator> = doc.generators.iter().map(|(a, b)| Generator::new(a, b)).collect();
    let bare = GroupPresentation::new(&doc.name, gens.clone(), &[], &[], doc.order)
        .map_err(|e| at_field(path, "generators", e))?;
    for (i, r) in doc.relators.iter().enumerate() {
        bare.parse_word(r).map_err(|e| at_field(path, &format!("relators[{i}]"), e))?;
    }
    for (i, (l, r)) in doc.rewrite_rules.iter().enumerate() {
        bare.parse_word(l)
            .and_then(|_| bare.parse_word(r))
            .map_err(|e| at_field(path, &format!("rewrite_rules[{i}]"), e))?;
    }
    let rel: Vec<&str> = doc.relators.iter().map(String::as_str).collect();
    let rules: Vec<(&str, &str)> = doc.rewrite_rules.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    GroupPresentation::new(&doc.name, gens, &rel, &rules, doc.order).map_err(|e| {
        let field = if e.to_string().contains("relator") { "relators" } else { "rewrite_rules" };
        at_field(path, field, e)
    })
}

/// Resolves a presentation reference: a built-in name, `"trivial"`, or a
/// document path.
pub fn load_presentation(reference: &str, base: &Path) -> Result<GroupPresentation> {
    if !is_path_reference(reference) {
        return builtins::presentation(reference);
    }
    let path = resolve(reference, base);
    let doc: PresentationDoc = read_document(&path)?;
    presentation_from_doc(&doc, &path.display().to_string())
}

pub fn complex_from_doc(doc: &ComplexDoc, path: &str, base: &Path) -> Result<ComplexSpec> {
    let group = Arc::new(load_presentation(&doc.group, base).map_err(|e| at_field(path, "group", e))?);
    let mut drafts = Vec::with_capacity(doc.orbits.len());
    for (i, o) in doc.orbits.iter().enumerate() {
        let mut d = OrbitDraft::new(&o.id, o.dim);
        for (j, (c, w, t)) in o.boundary.iter().enumerate() {
            let g = group.element(w).map_err(|e| at_field(path, &format!("orbits[{i}].boundary[{j}]"), e))?;
            d = d.term(*c, g, t);
        }
        drafts.push(d);
    }
    ComplexSpec::new(&doc.label, group, drafts).map_err(|e| at_field(path, "orbits", e))
}

pub fn load_complex(reference: &str, base: &Path) -> Result<ComplexSpec> {
    if !is_path_reference(reference) {
        return builtins::complex(reference);
    }
    let path = resolve(reference, base);
    let doc: ComplexDoc = read_document(&path)?;
    complex_from_doc(&doc, &path.display().to_string(), &parent(&path))
}

pub fn chain_map_from_doc(doc: &ChainMapDoc, path: &str, base: &Path) -> Result<ChainMapSpec> {
    let source = Arc::new(load_complex(&doc.source, base).map_err(|e| at_field(path, "source", e))?);
    let target = Arc::new(load_complex(&doc.target, base).map_err(|e| at_field(path, "target", e))?);
    let mut group_map = Vec::new();
    for g in source.group().generators() {
        let word = doc
            .group_map
            .get(&g.name)
            .ok_or_else(|| doc_error(path, "group_map", format!("no image for generator `{}`", g.name)))?;
        let h = target.group().element(word).map_err(|e| at_field(path, &format!("group_map.{}", g.name), e))?;
        group_map.push(h);
    }
    if let Some(extra) = doc.group_map.keys().find(|k| source.group().generator_index(k).is_none()) {
        return Err(doc_error(path, "group_map", format!("`{extra}` is not a generator of the source group")));
    }
    let mut images = vec![FormalChain::new(); source.orbits().len()];
    for (id, lit) in &doc.images {
        let o = source
            .orbit_index(id)
            .ok_or_else(|| doc_error(path, "images", format!("`{id}` is not an orbit of the source")))?;
        images[o] = literal_to_formal(&target, lit).map_err(|e| at_field(path, &format!("images.{id}"), e))?;
    }
    ChainMapSpec::new(&doc.label, source, target, group_map, images).map_err(|e| at_field(path, "images", e))
}

pub fn load_chain_map(reference: &str, base: &Path) -> Result<ChainMapSpec> {
    if !is_path_reference(reference) {
        return builtins::chain_map(reference);
    }
    let path = resolve(reference, base);
    let doc: ChainMapDoc = read_document(&path)?;
    chain_map_from_doc(&doc, &path.display().to_string(), &parent(&path))
}

/// Deterministic text describing a presentation completely.
pub fn presentation_fingerprint(p: &GroupPresentation) -> String {
    let mut s = format!("presentation {} {:?}\n", p.name(), p.order());
    for g in p.generators() {
        let _ = writeln!(s, "gen {} {}", g.name, g.inverse_name);
    }
    for r in p.relators() {
        let _ = writeln!(s, "rel {}", p.format_word(r));
    }
    for r in p.rules() {
        let _ = writeln!(s, "rule {} -> {}", p.format_word(&r.lhs), p.format_word(&r.rhs));
    }
    s
}

/// Deterministic text describing a complex completely.
pub fn complex_fingerprint(c: &ComplexSpec) -> String {
    let mut s = format!("complex {}\n", c.label());
    s.push_str(&presentation_fingerprint(c.group()));
    for o in c.orbits() {
        let _ = write!(s, "orbit {} {}", o.id, o.dim);
        for t in &o.boundary {
            let _ = write!(s, " [{} {} {}]", t.coef, c.group().format(&t.element), c.orbits()[t.target].id);
        }
        s.push('\n');
    }
    s
}

pub fn chain_map_fingerprint(m: &ChainMapSpec) -> String {
    let mut s = format!("map {}\n", m.label());
    s.push_str(&complex_fingerprint(m.source()));
    s.push_str(&complex_fingerprint(m.target()));
    for g in m.group_map() {
        let _ = writeln!(s, "gmap {}", m.target().group().format(g));
    }
    for (o, orbit) in m.source().orbits().iter().enumerate() {
        let _ = write!(s, "image {}", orbit.id);
        for (t, g, c) in m.image(o).iter() {
            let _ = write!(s, " [{} {} {}]", c, m.target().group().format(g), m.target().orbits()[t].id);
        }
        s.push('\n');
    }
    s
}
