//! Built-in presentations, complexes and chain maps.

use std::sync::Arc;

use serde::Serialize;

use crate::chain_map::ChainMapSpec;
use crate::complex::{build_presentation_complex, build_quotient_complex, ComplexSpec, FormalChain, OrbitDraft};
use crate::error::{Error, Result};
use crate::group::{Generator, GroupElement, GroupPresentation, ReductionOrder};

const LETTERS: [(&str, &str); 3] = [("x", "X"), ("y", "Y"), ("z", "Z")];

fn generators(n: usize) -> Vec<Generator> {
    LETTERS[..n].iter().map(|(a, b)| Generator::new(a, b)).collect()
}

fn cancellations(n: usize) -> Vec<(String, String)> {
    LETTERS[..n]
        .iter()
        .flat_map(|(a, b)| [(format!("{a}{b}"), String::new()), (format!("{b}{a}"), String::new())])
        .collect()
}

fn build(name: &str, gens: Vec<Generator>, relators: &[String], rules: &[(String, String)], order: ReductionOrder) -> Result<GroupPresentation> {
    let rel: Vec<&str> = relators.iter().map(|s| s.as_str()).collect();
    let rul: Vec<(&str, &str)> = rules.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    GroupPresentation::new(name, gens, &rel, &rul, order)
}

/// Free abelian group of rank `n ≤ 3` with commutation rules sorting
/// letters alphabetically.
pub fn free_abelian(n: usize) -> Result<GroupPresentation> {
    if n == 0 || n > 3 {
        return Err(Error::InvalidInput(format!("built-in free abelian groups have rank 1 to 3, not {n}")));
    }
    let mut rules = cancellations(n);
    let mut relators = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, ai) = LETTERS[i];
            let (b, bi) = LETTERS[j];
            for (p, q) in [(a, b), (ai, b), (a, bi), (ai, bi)] {
                rules.push((format!("{q}{p}"), format!("{p}{q}")));
            }
            relators.push(format!("{a}{b}{ai}{bi}"));
        }
    }
    build(&format!("z{n}"), generators(n), &relators, &rules, ReductionOrder::Shortlex)
}

pub fn free_group(n: usize) -> Result<GroupPresentation> {
    if n == 0 || n > 3 {
        return Err(Error::InvalidInput(format!("built-in free groups have rank 1 to 3, not {n}")));
    }
    build(&format!("free{n}"), generators(n), &[], &cancellations(n), ReductionOrder::Shortlex)
}

/// Integer Heisenberg group with normal forms `x^a y^b z^c`, where
/// `z = [x, y]` is central and `y x = x y z⁻¹`.
pub fn heisenberg() -> Result<GroupPresentation> {
    let mut rules = cancellations(3);
    for (from, to) in [
        ("yx", "xyZ"),
        ("yX", "Xyz"),
        ("Yx", "xYz"),
        ("YX", "XYZ"),
        ("zx", "xz"),
        ("zX", "Xz"),
        ("Zx", "xZ"),
        ("ZX", "XZ"),
        ("zy", "yz"),
        ("zY", "Yz"),
        ("Zy", "yZ"),
        ("ZY", "YZ"),
    ] {
        rules.push((from.into(), to.into()));
    }
    let relators = ["xyXYZ", "xzXZ", "yzYZ"].map(String::from);
    build("heisenberg3", generators(3), &relators, &rules, ReductionOrder::Wreath)
}

/// `⟨x | x², x^{2k}⟩`, a presentation of Z/2.
pub fn gersten_presentation(k: u32) -> Result<GroupPresentation> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("gersten(k) needs k >= 2, got {k}")));
    }
    let rules = vec![("xx".to_string(), String::new()), ("X".to_string(), "x".to_string())];
    let relators = vec!["xx".to_string(), format!("x^{}", 2 * k)];
    build(&format!("gersten({k})"), generators(1), &relators, &rules, ReductionOrder::Shortlex)
}

/// `⟨t, x, y | [x, y], t⁻¹xy⟩`, a presentation of Z² with a redundant
/// generator `t = xy`.
pub fn z2_redundant() -> Result<GroupPresentation> {
    let gens = vec![Generator::new("t", "T"), Generator::new("x", "X"), Generator::new("y", "Y")];
    let mut rules: Vec<(String, String)> = vec![("t".into(), "xy".into()), ("T".into(), "YX".into())];
    for (from, to) in [("xX", ""), ("Xx", ""), ("yY", ""), ("Yy", ""), ("yx", "xy"), ("Yx", "xY"), ("yX", "Xy"), ("YX", "XY")] {
        rules.push((from.into(), to.into()));
    }
    let relators = ["xyXY", "Txy"].map(String::from);
    build("z2-redundant", gens, &relators, &rules, ReductionOrder::Wreath)
}

fn parse_param(name: &str, base: &str) -> Option<Result<u32>> {
    let inner = name.strip_prefix(base)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(
        inner
            .trim()
            .parse::<u32>()
            .map_err(|_| Error::InvalidInput(format!("`{name}`: parameter must be a non-negative integer"))),
    )
}

pub fn presentation(name: &str) -> Result<GroupPresentation> {
    if let Some(k) = parse_param(name, "gersten") {
        return gersten_presentation(k?);
    }
    match name {
        "z1" => free_abelian(1),
        "z2" => free_abelian(2),
        "z3" => free_abelian(3),
        "free1" => free_group(1),
        "free2" => free_group(2),
        "free3" => free_group(3),
        "heisenberg3" => heisenberg(),
        "z2-redundant" => z2_redundant(),
        "trivial" => Ok(GroupPresentation::trivial()),
        _ => Err(Error::InvalidInput(format!("unknown built-in presentation `{name}`"))),
    }
}

fn presentation_complex(p: GroupPresentation, label: &str) -> Result<ComplexSpec> {
    Ok(build_presentation_complex(Arc::new(p))?.with_label(label))
}

/// Cube complex of Z³: squares `s_ab` and one cube.
pub fn z3_cubes() -> Result<ComplexSpec> {
    let p = Arc::new(free_abelian(3)?);
    let g = |w: &str| p.element(w);
    let e = GroupElement::identity;
    let mut drafts = vec![OrbitDraft::new("v", 0)];
    for a in ["x", "y", "z"] {
        drafts.push(OrbitDraft::new(&format!("e{a}"), 1).term(1, g(a)?, "v").term(-1, e(), "v"));
    }
    for (a, b) in [("x", "y"), ("x", "z"), ("y", "z")] {
        drafts.push(
            OrbitDraft::new(&format!("s{a}{b}"), 2)
                .term(1, e(), &format!("e{a}"))
                .term(1, g(a)?, &format!("e{b}"))
                .term(-1, g(b)?, &format!("e{a}"))
                .term(-1, e(), &format!("e{b}")),
        );
    }
    drafts.push(
        OrbitDraft::new("c", 3)
            .term(1, g("x")?, "syz")
            .term(-1, e(), "syz")
            .term(-1, g("y")?, "sxz")
            .term(1, e(), "sxz")
            .term(1, g("z")?, "sxy")
            .term(-1, e(), "sxy"),
    );
    ComplexSpec::new("z3-cubes", p.clone(), drafts)
}

/// Gersten's complex: one vertex, one loop, and 2-cells with boundary
/// `2e` and `2k·e`, with the trivial group acting.
pub fn gersten_complex(k: u32) -> Result<ComplexSpec> {
    let p = gersten_presentation(k)?;
    Ok(build_quotient_complex(&p)?.with_label(&format!("gersten({k})")))
}

/// The universal cover of the same presentation complex (Z/2 acting).
pub fn gersten_cover(k: u32) -> Result<ComplexSpec> {
    presentation_complex(gersten_presentation(k)?, &format!("gersten-cover({k})"))
}

pub fn complex(name: &str) -> Result<ComplexSpec> {
    if let Some(k) = parse_param(name, "gersten") {
        return gersten_complex(k?);
    }
    if let Some(k) = parse_param(name, "gersten-cover") {
        return gersten_cover(k?);
    }
    match name {
        "z1-circle" => presentation_complex(free_abelian(1)?, name),
        "z2-torus" => presentation_complex(free_abelian(2)?, name),
        "z3-cubes" => z3_cubes(),
        "z3-torus2" => presentation_complex(free_abelian(3)?, name),
        "free1" | "free2" | "free3" => presentation_complex(presentation(name)?, name),
        "heisenberg3" => presentation_complex(heisenberg()?, name),
        "z2-redundant" => presentation_complex(z2_redundant()?, name),
        _ => Err(Error::InvalidInput(format!("unknown built-in complex `{name}`"))),
    }
}

fn image(target: &ComplexSpec, terms: &[(i64, &str, &str)]) -> Result<FormalChain> {
    let mut f = FormalChain::new();
    for &(c, id, w) in terms {
        let o = target
            .orbit_index(id)
            .ok_or_else(|| Error::Internal(format!("built-in map refers to missing orbit `{id}`")))?;
        f.add(o, target.group().element(w)?, c);
    }
    Ok(f)
}

fn group_images(target: &ComplexSpec, words: &[&str]) -> Result<Vec<GroupElement>> {
    words.iter().map(|w| target.group().element(w)).collect()
}

/// Builds a map from per-orbit image terms, listed by source orbit id.
fn map_from(
    label: &str,
    source: ComplexSpec,
    target: ComplexSpec,
    words: &[&str],
    images: &[(&str, &[(i64, &str, &str)])],
) -> Result<ChainMapSpec> {
    let gm = group_images(&target, words)?;
    let mut imgs = vec![FormalChain::new(); source.orbits().len()];
    for (id, terms) in images {
        let o = source
            .orbit_index(id)
            .ok_or_else(|| Error::Internal(format!("built-in map refers to missing orbit `{id}`")))?;
        imgs[o] = image(&target, terms)?;
    }
    ChainMapSpec::new(label, Arc::new(source), Arc::new(target), gm, imgs)
}

pub fn identity_map(spec: Arc<ComplexSpec>) -> Result<ChainMapSpec> {
    let gm = (0..spec.group().generators().len())
        .map(|i| spec.group().reduce_word(&[crate::group::Letter::new(i, false)]))
        .collect::<Result<Vec<_>>>()?;
    let imgs = (0..spec.orbits().len()).map(|o| FormalChain::cell(o, GroupElement::identity())).collect();
    ChainMapSpec::new(&format!("identity({})", spec.label()), spec.clone(), spec, gm, imgs)
}

fn gersten_twist(k: u32) -> Result<ChainMapSpec> {
    let c = 1 - k as i64;
    let r0: &[(i64, &str, &str)] = &[(c, "r0", ""), (1, "r1", "")];
    map_from(
        &format!("gersten-twist({k})"),
        gersten_complex(k)?,
        gersten_complex(k)?,
        &[],
        &[("v", &[(1, "v", "")]), ("ex", &[(1, "ex", "")]), ("r0", r0), ("r1", &[(1, "r1", "")])],
    )
}

pub fn chain_map(name: &str) -> Result<ChainMapSpec> {
    if let Some(k) = parse_param(name, "gersten-twist") {
        return gersten_twist(k?);
    }
    if let Some(inner) = name.strip_prefix("identity(").and_then(|s| s.strip_suffix(')')) {
        return identity_map(Arc::new(complex(inner)?));
    }
    let torus = || complex("z2-torus");
    let v: (&str, &[(i64, &str, &str)]) = ("v", &[(1, "v", "")]);
    let ex: (&str, &[(i64, &str, &str)]) = ("ex", &[(1, "ex", "")]);
    let ey: (&str, &[(i64, &str, &str)]) = ("ey", &[(1, "ey", "")]);
    match name {
        "z2-identity" => Ok(identity_map(Arc::new(torus()?))?.relabel(name)),
        "z2-doubling" => map_from(
            name,
            torus()?,
            torus()?,
            &["x", "y"],
            &[
                ("v", &[(1, "v", ""), (1, "v", "x")]),
                ("ex", &[(1, "ex", ""), (1, "ex", "x")]),
                ("ey", &[(1, "ey", ""), (1, "ey", "x")]),
                ("r0", &[(1, "r0", ""), (1, "r0", "x")]),
            ],
        ),
        "z2-scale2" => map_from(
            name,
            torus()?,
            torus()?,
            &["xx", "yy"],
            &[
                v,
                ("ex", &[(1, "ex", ""), (1, "ex", "x")]),
                ("ey", &[(1, "ey", ""), (1, "ey", "y")]),
                ("r0", &[(1, "r0", ""), (1, "r0", "x"), (1, "r0", "y"), (1, "r0", "xy")]),
            ],
        ),
        "z2-std-to-redundant" => map_from(
            name,
            torus()?,
            complex("z2-redundant")?,
            &["x", "y"],
            &[v, ex, ey, ("r0", &[(1, "r0", "")])],
        ),
        "z2-redundant-to-std" => map_from(
            name,
            complex("z2-redundant")?,
            torus()?,
            &["xy", "x", "y"],
            &[v, ("et", &[(1, "ex", ""), (1, "ey", "x")]), ex, ey, ("r0", &[(1, "r0", "")])],
        ),
        "z3-coordinate-plane" => map_from(
            name,
            torus()?,
            z3_cubes()?,
            &["x", "y"],
            &[v, ex, ey, ("r0", &[(1, "sxy", "")])],
        ),
        "z3-to-z2-projection" => map_from(
            name,
            z3_cubes()?,
            torus()?,
            &["x", "y", ""],
            &[v, ex, ey, ("sxy", &[(1, "r0", "")])],
        ),
        "free2-in-z2" => map_from(name, complex("free2")?, torus()?, &["x", "y"], &[v, ex, ey]),
        _ => Err(Error::InvalidInput(format!("unknown built-in chain map `{name}`"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub kind: &'static str,
    pub name: String,
    pub top_dim: Option<usize>,
    pub orbits_per_dim: Vec<usize>,
    pub note: String,
}

pub const PRESENTATIONS: [&str; 9] =
    ["z1", "z2", "z3", "free1", "free2", "free3", "heisenberg3", "gersten(k)", "z2-redundant"];

pub const COMPLEXES: [&str; 11] = [
    "z1-circle",
    "z2-torus",
    "z3-cubes",
    "z3-torus2",
    "free1",
    "free2",
    "free3",
    "heisenberg3",
    "gersten(k)",
    "gersten-cover(k)",
    "z2-redundant",
];

pub const CHAIN_MAPS: [&str; 10] = [
    "z2-identity",
    "z2-doubling",
    "z2-scale2",
    "z2-std-to-redundant",
    "z2-redundant-to-std",
    "z3-coordinate-plane",
    "z3-to-z2-projection",
    "free2-in-z2",
    "gersten-twist(k)",
    "identity(<complex>)",
];

/// The fixed catalog. Parameterized entries are described with `k = 2`.
pub fn catalog() -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for name in PRESENTATIONS {
        let p = presentation(&name.replace("(k)", "(2)"))?;
        let mut note = format!("{} generators, {} relators", p.generators().len(), p.relators().len());
        if name.contains("(k)") {
            note.push_str("; requires k >= 2");
        }
        out.push(CatalogEntry { kind: "presentation", name: name.to_string(), top_dim: None, orbits_per_dim: vec![], note });
    }
    for name in COMPLEXES {
        let c = complex(&name.replace("(k)", "(2)"))?;
        let note = match name {
            "gersten(k)" => "requires k >= 2; trivial group acting".to_string(),
            "gersten-cover(k)" => "requires k >= 2; Z/2 acting on the universal cover".to_string(),
            _ => format!("group {}", c.group().name()),
        };
        out.push(CatalogEntry {
            kind: "complex",
            name: name.to_string(),
            top_dim: Some(c.top_dim()),
            orbits_per_dim: (0..=c.top_dim()).map(|d| c.orbit_count(d)).collect(),
            note,
        });
    }
    for name in CHAIN_MAPS {
        let note = if name.starts_with("identity") {
            "identity on any built-in complex".to_string()
        } else {
            let m = chain_map(&name.replace("(k)", "(2)"))?;
            format!("{} -> {}", m.source().label(), m.target().label())
        };
        out.push(CatalogEntry { kind: "chain-map", name: name.to_string(), top_dim: None, orbits_per_dim: vec![], note });
    }
    Ok(out)
}
