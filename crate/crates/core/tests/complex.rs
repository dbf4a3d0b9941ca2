mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fillnorm::builtins;
use fillnorm::chain::cycle_rank;
use fillnorm::complex::{build_presentation_complex, ComplexSpec, ComplexWindow};
use fillnorm::document::{self, ComplexDoc, PresentationDoc};
use fillnorm::error::{Error, ErrorKind};
use fillnorm::group::GroupElement;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{caps, cycle_rank_oracle, spec, window};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn all_builtin_specs() -> Vec<Arc<ComplexSpec>> {
    let mut out: Vec<Arc<ComplexSpec>> =
        builtins::COMPLEXES.iter().map(|n| spec(&n.replace("(k)", "(2)"))).collect();
    out.push(spec("gersten(3)"));
    out.push(spec("gersten-cover(3)"));
    out
}

/// ∂∂ by direct matrix product over cells whose faces are all in the window.
fn dd_violations(w: &ComplexWindow) -> usize {
    let mut bad = 0;
    for d in 2..=w.top_dim() {
        for i in 0..w.cell_count(d) {
            if w.is_clipped(d, i) || w.boundary_column(d, i).iter().any(|&(f, _)| w.is_clipped(d - 1, f)) {
                continue;
            }
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(f, a) in w.boundary_column(d, i) {
                for &(g, b) in w.boundary_column(d - 1, f) {
                    *acc.entry(g).or_insert(0) += a * b;
                }
            }
            if acc.values().any(|&v| v != 0) {
                bad += 1;
            }
        }
    }
    bad
}

#[test]
fn torus_presentation_complex() {
    let s = spec("z2-torus");
    assert_eq!((s.orbit_count(0), s.orbit_count(1), s.orbit_count(2)), (1, 2, 1));
    let r0 = &s.orbits()[s.orbit_index("r0").unwrap()];
    assert_eq!(r0.boundary.len(), 4);
    assert!(r0.boundary.iter().all(|t| t.coef.abs() == 1));
}

#[test]
fn gersten_quotient_complex() {
    for k in [2u32, 3] {
        let s = builtins::gersten_complex(k).unwrap();
        assert_eq!((s.orbit_count(0), s.orbit_count(1), s.orbit_count(2)), (1, 1, 2));
        let coefs: Vec<i64> = ["r0", "r1"]
            .iter()
            .map(|id| {
                let o = &s.orbits()[s.orbit_index(id).unwrap()];
                assert_eq!(o.boundary.len(), 1);
                o.boundary[0].coef
            })
            .collect();
        assert_eq!(coefs, vec![2, 2 * k as i64]);
        assert!(s.group().is_trivial());
    }
}

#[test]
fn free_group_has_no_cycles() {
    let s = spec("free2");
    assert_eq!(s.orbit_count(2), 0);
    for r in 0..4 {
        let w = window("free2", r);
        assert_eq!(cycle_rank(&w, 1), 0);
        assert_eq!(cycle_rank_oracle(&w, 1), 0);
    }
}

#[test]
fn empty_relator_is_rejected() {
    let doc: PresentationDoc = document::parse_document(
        "inline",
        r#"{"version": 1, "name": "e", "generators": [["a", "A"]], "relators": [""]}"#,
    )
    .unwrap();
    let p = document::presentation_from_doc(&doc, "inline").unwrap();
    let err = build_presentation_complex(Arc::new(p)).unwrap_err();
    assert!(matches!(err, Error::InvalidComplex(_)), "{err}");
}

#[test]
fn window_cell_counts() {
    let w = window("z2-torus", 0);
    assert_eq!(w.cell_counts(), vec![1, 2, 1]);
    assert!(w.cells(0).iter().all(|c| c.element == GroupElement::identity()));
    let w = window("z2-torus", 2);
    assert_eq!(w.cell_count(0), 13);
    let ball = w.group().ball_enumerate(2, 100).unwrap();
    assert_eq!(w.cell_count(0), ball.len());
    assert_eq!(w.cell_counts(), vec![13, 26, 13]);
}

#[test]
fn cube_boundary_has_six_faces() {
    let w = window("z3-cubes", 1);
    let s = w.spec();
    let cube = w
        .cell_index(3, &fillnorm::complex::Cell { orbit: s.orbit_index("c").unwrap(), element: GroupElement::identity() })
        .unwrap();
    let col = w.boundary_column(3, cube);
    assert_eq!(col.len(), 6);
    assert!(col.iter().all(|&(_, c)| c.abs() == 1));
    assert!(!w.is_clipped(3, cube));
}

#[test]
fn boundary_squared_vanishes_on_builtin_windows() {
    for s in all_builtin_specs() {
        for r in 0..=3 {
            let w = s.instantiate_window(r, caps().max_ball_size).unwrap();
            assert_eq!(dd_violations(&w), 0, "{}", s.label());
        }
    }
    let w = window("z3-cubes", 2);
    assert!(w.boundary_squared_checked() > 0);
}

#[test]
fn boundary_squared_vanishes_on_random_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let specs = all_builtin_specs();
    let mut done = 0;
    while done < 1000 {
        let s = &specs[rng.gen_range(0..specs.len())];
        if s.top_dim() < 2 {
            continue;
        }
        let w = s.instantiate_window(2, caps().max_ball_size).unwrap();
        let d = rng.gen_range(2..=w.top_dim());
        let cells: Vec<usize> = (0..w.cell_count(d))
            .filter(|&i| !w.is_clipped(d, i) && w.boundary_column(d, i).iter().all(|&(f, _)| !w.is_clipped(d - 1, f)))
            .collect();
        if cells.is_empty() {
            continue;
        }
        let c = fillnorm::bounds::random_chain(&mut rng, d, &cells, 8);
        let bb = c.boundary(&w).unwrap().boundary(&w).unwrap();
        assert!(bb.is_zero(), "{}", s.label());
        done += 1;
    }
}

#[test]
fn eilenberg_trick_adds_a_free_summand() {
    let s = spec("z2-torus");
    let t = s.eilenberg_trick(1).unwrap();
    assert_eq!((t.orbit_count(1), t.orbit_count(2)), (3, 2));
    let (w0, t0) = (
        s.instantiate_window(0, 100).unwrap(),
        Arc::new(t.clone()).instantiate_window(0, 100).unwrap(),
    );
    assert_eq!(cycle_rank(&t0, 1), cycle_rank(&w0, 1) + 1);

    let tt = Arc::new(t.eilenberg_trick(1).unwrap());
    for r in 0..3 {
        let w = s.instantiate_window(r, 1000).unwrap();
        let ww = tt.instantiate_window(r, 1000).unwrap();
        assert_eq!(cycle_rank(&ww, 1), cycle_rank(&w, 1) + 2 * w.ball().len());
        assert_eq!(cycle_rank_oracle(&ww, 1), cycle_rank(&ww, 1));
    }

    let z3 = spec("z3-cubes");
    let t3 = Arc::new(z3.eilenberg_trick(2).unwrap());
    let w = z3.instantiate_window(1, 100).unwrap();
    let tw = t3.instantiate_window(1, 100).unwrap();
    let grown = cycle_rank_oracle(&tw, 2) - cycle_rank_oracle(&w, 2);
    assert_eq!(grown, w.ball().len());
    assert_eq!(cycle_rank(&tw, 2), cycle_rank_oracle(&tw, 2));

    assert!(matches!(z3.eilenberg_trick(0), Err(Error::InvalidInput(_))));
}

#[test]
fn cycle_rank_matches_oracle() {
    for s in all_builtin_specs() {
        let w = s.instantiate_window(2, 1000).unwrap();
        for d in 1..=w.top_dim() {
            assert_eq!(cycle_rank(&w, d), cycle_rank_oracle(&w, d), "{} dim {d}", s.label());
        }
    }
}

#[test]
fn cube_document_matches_builtin() {
    let c = document::load_complex(data("z3-cubes.json").to_str().unwrap(), Path::new(".")).unwrap();
    assert_eq!((0..=3).map(|d| c.orbit_count(d)).collect::<Vec<_>>(), vec![1, 3, 3, 1]);
    let b = builtins::z3_cubes().unwrap();
    assert_eq!(c.orbits(), b.orbits());
}

#[test]
fn gersten_document_is_valid() {
    let c = document::load_complex(data("gersten-2.json").to_str().unwrap(), Path::new(".")).unwrap();
    assert_eq!(c.orbits(), builtins::gersten_complex(2).unwrap().orbits());
}

#[test]
fn presentation_reference_resolves_relative_to_document() {
    let c = document::load_complex(data("z2-torus.json").to_str().unwrap(), Path::new("/")).unwrap();
    assert_eq!(c.group().name(), "z2-doc");
    assert_eq!(c.orbits(), builtins::complex("z2-torus").unwrap().orbits());
}

#[test]
fn non_cycle_boundary_is_a_consistency_error() {
    let text = r#"{
        "version": 1, "label": "broken", "group": "z2",
        "orbits": [
            {"id": "v", "dim": 0},
            {"id": "ex", "dim": 1, "boundary": [[1, "x", "v"], [-1, "", "v"]]},
            {"id": "ey", "dim": 1, "boundary": [[1, "y", "v"], [-1, "", "v"]]},
            {"id": "r0", "dim": 2, "boundary": [[1, "", "ex"], [1, "x", "ey"], [-1, "y", "ex"]]}
        ]
    }"#;
    let doc: ComplexDoc = document::parse_document("broken.json", text).unwrap();
    let err = document::complex_from_doc(&doc, "broken.json", Path::new(".")).unwrap_err();
    assert!(matches!(err, Error::SpecConsistency(_)), "{err}");
    assert_eq!(err.kind(), ErrorKind::Inconsistency);
    assert!(err.to_string().contains("broken.json"));
}

#[test]
fn document_errors_name_the_field() {
    let unknown = r#"{"version": 1, "label": "x", "group": "z2", "orbits": [], "extra": 1}"#;
    let err = document::parse_document::<ComplexDoc>("a.json", unknown).unwrap_err();
    assert!(matches!(&err, Error::Document { path, .. } if path == "a.json"), "{err}");

    let wrong_type = r#"{"version": 1, "label": "x", "group": "z2", "orbits": [{"id": "v", "dim": "zero"}]}"#;
    match document::parse_document::<ComplexDoc>("b.json", wrong_type).unwrap_err() {
        Error::Document { field, .. } => assert_eq!(field, "orbits[0].dim"),
        e => panic!("{e}"),
    }

    let version = r#"{"version": 7, "label": "x", "group": "z2", "orbits": []}"#;
    match document::parse_document::<ComplexDoc>("c.json", version).unwrap_err() {
        Error::Document { field, .. } => assert_eq!(field, "version"),
        e => panic!("{e}"),
    }

    let bad_word = r#"{"version": 1, "label": "x", "group": "z2",
        "orbits": [{"id": "v", "dim": 0}, {"id": "ex", "dim": 1, "boundary": [[1, "q", "v"]]}]}"#;
    let doc: ComplexDoc = document::parse_document("d.json", bad_word).unwrap();
    match document::complex_from_doc(&doc, "d.json", Path::new(".")).unwrap_err() {
        Error::Document { field, .. } => assert_eq!(field, "orbits[1].boundary[0]"),
        e => panic!("{e}"),
    }
}

#[test]
fn translation_is_equivariant_on_windows() {
    let w = window("heisenberg3", 3);
    let g = w.group().element("xy").unwrap();
    for d in 0..=2 {
        for i in 0..w.cell_count(d) {
            let Some(j) = w.translate_cell(d, i, &g).unwrap() else { continue };
            if w.is_clipped(d, i) || w.is_clipped(d, j) {
                continue;
            }
            let moved: Vec<Option<usize>> =
                w.boundary_column(d, i).iter().map(|&(f, _)| w.translate_cell(d - 1, f, &g).unwrap()).collect();
            let mut expect: Vec<(usize, i64)> =
                w.boundary_column(d, i).iter().zip(moved).map(|(&(_, c), f)| (f.unwrap(), c)).collect();
            expect.sort_unstable();
            assert_eq!(expect, w.boundary_column(d, j).to_vec());
        }
    }
}
