mod common;

use std::collections::BTreeMap;

use fillnorm::bounds::random_chain;
use fillnorm::chain::{canonical_key, canonical_translate, centered_translate, Chain};
use fillnorm::complex::ComplexWindow;
use fillnorm::enumerate::{circuit_decompose, enumerate_cycles, EnumerationMode};
use fillnorm::error::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_cycles, caps, chain, class_keys, rectangle, window, z2};

#[test]
fn l1_norm_examples() {
    let w = window("z2-torus", 2);
    assert_eq!(Chain::zero(1).l1_norm(), 0);
    assert_eq!(rectangle(&w, 0, 0, 1, 1).l1_norm(), 4);
    let c = chain(&w, 1, &[(3, "ex", ""), (-2, "ey", "x")]);
    assert_eq!(c.l1_norm(), 5);
}

#[test]
fn boundary_examples() {
    let w = window("z2-torus", 2);
    let sq = chain(&w, 2, &[(1, "r0", "")]);
    let b = sq.boundary(&w).unwrap();
    assert_eq!(b.support_len(), 4);
    assert_eq!(b.l1_norm(), 4);
    assert!(b.boundary(&w).unwrap().is_zero());

    let w3 = window("z3-cubes", 1);
    let cube = chain(&w3, 3, &[(1, "c", "")]);
    let b = cube.boundary(&w3).unwrap();
    assert_eq!(b.support_len(), 6);
    assert!(b.iter().all(|(_, c)| c.abs() == 1));
}

#[test]
fn clipped_boundary_is_window_too_small() {
    let w = window("z2-torus", 1);
    let c = chain(&w, 2, &[(1, "r0", "x")]);
    assert!(matches!(c.boundary(&w), Err(Error::WindowTooSmall(_))));
}

#[test]
fn cycle_examples() {
    let w = window("z2-torus", 4);
    for k in 1..=3 {
        assert!(rectangle(&w, -1, -1, k, k).is_cycle(&w).unwrap());
    }
    assert!(!chain(&w, 1, &[(1, "ex", "")]).is_cycle(&w).unwrap());
    let two = &rectangle(&w, 0, 0, 1, 1) + &rectangle(&w, -2, -2, 1, 1);
    assert!(two.is_cycle(&w).unwrap());
    assert_eq!(two.l1_norm(), 8);
}

#[test]
fn canonical_translate_examples() {
    let w = window("z2-torus", 4);
    let at_origin = rectangle(&w, 0, 0, 1, 1);
    let moved = rectangle(&w, 1, -2, 1, 1);
    let c = canonical_translate(&w, &moved).unwrap();
    assert_eq!(c, canonical_translate(&w, &at_origin).unwrap());
    assert_eq!(canonical_translate(&w, &c).unwrap(), c);
    assert_eq!(c.l1_norm(), 4);
    assert!(c.anchors(&w).iter().any(|g| g.is_identity()));

    // A 2×1 rectangle: same class wherever it sits, ℓ1 stays 6.
    let reps: Vec<Chain> = [(0, 0), (-2, 1), (1, -1), (-1, -2)]
        .iter()
        .map(|&(a, b)| canonical_translate(&w, &rectangle(&w, a, b, 2, 1)).unwrap())
        .collect();
    assert!(reps.windows(2).all(|p| p[0] == p[1]));
    assert_eq!(reps[0].l1_norm(), 6);
    // Relabeling oracle: the canonical chain is a translate of the input.
    let input = rectangle(&w, -2, 1, 2, 1);
    let found = (-3..=3).flat_map(|a| (-3..=3).map(move |b| (a, b))).any(|(a, b)| {
        let g = w.group().element(&z2(a, b)).unwrap();
        input.translate(&w, &g).ok().as_ref() == Some(&reps[0])
    });
    assert!(found);
    assert!(canonical_translate(&w, &Chain::zero(1)).is_err());
}

#[test]
fn centered_translate_fits_smaller_window() {
    let big = window("z2-torus", 5);
    let small = window("z2-torus", 2);
    let far = rectangle(&big, 2, 2, 1, 1);
    let c = centered_translate(&big, &far, &small).unwrap();
    assert_eq!(c.l1_norm(), 4);
    assert!(c.is_cycle(&small).unwrap());
    let wide = rectangle(&big, 0, 0, 4, 1);
    assert!(matches!(centered_translate(&big, &wide, &small), Err(Error::WindowTooSmall(_))));
}

#[test]
fn enumeration_examples() {
    let w = window("z2-torus", 2);
    for r in [2, 3] {
        let w = window("z2-torus", r);
        assert!(enumerate_cycles(&w, 1, 3, EnumerationMode::Exhaustive, &caps()).unwrap().is_empty());
        let four = enumerate_cycles(&w, 1, 4, EnumerationMode::Exhaustive, &caps()).unwrap();
        assert_eq!(four.len(), 2);
        assert!(four.iter().all(|z| z.l1_norm() == 4 && z.is_cycle(&w).unwrap()));
        let unit = canonical_key(&w, &rectangle(&w, 0, 0, 1, 1)).unwrap().0;
        let neg = canonical_key(&w, &rectangle(&w, 0, 0, 1, 1).scale(-1)).unwrap().0;
        let keys = class_keys(&w, &four);
        assert!(keys.contains(&unit) && keys.contains(&neg));
    }
    let free = window("free2", 3);
    for k in 1..=6 {
        assert!(enumerate_cycles(&free, 1, k, EnumerationMode::Exhaustive, &caps()).unwrap().is_empty());
        assert!(enumerate_cycles(&free, 1, k, EnumerationMode::Circuits, &caps()).unwrap().is_empty());
    }
    assert!(matches!(enumerate_cycles(&w, 1, 0, EnumerationMode::Exhaustive, &caps()), Err(Error::InvalidInput(_))));
}

#[test]
fn enumeration_matches_brute_force() {
    let w = window("z2-torus", 2);
    for k in 1..=6 {
        let brute = class_keys(&w, &brute_force_cycles(&w, 1, k));
        let found = enumerate_cycles(&w, 1, k, EnumerationMode::Exhaustive, &caps()).unwrap();
        assert_eq!(class_keys(&w, &found), brute, "k={k}");
        assert_eq!(found.len(), brute.len());
    }
    let w = window("z3-cubes", 1);
    for k in [4, 5, 6] {
        let brute = class_keys(&w, &brute_force_cycles(&w, 2, k));
        let found = enumerate_cycles(&w, 2, k, EnumerationMode::Exhaustive, &caps()).unwrap();
        assert_eq!(class_keys(&w, &found), brute, "k={k}");
    }
}

#[test]
fn enumeration_output_is_sorted_and_canonical() {
    let w = window("z2-torus", 3);
    let cycles = enumerate_cycles(&w, 1, 8, EnumerationMode::Exhaustive, &caps()).unwrap();
    let keys: Vec<_> = cycles.iter().map(|z| (z.l1_norm(), canonical_key(&w, z).unwrap().0)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(keys, sorted);
    for z in &cycles {
        assert!(z.is_cycle(&w).unwrap());
    }
    let circuits = enumerate_cycles(&w, 1, 8, EnumerationMode::Circuits, &caps()).unwrap();
    assert!(circuits.len() < cycles.len());
    for z in &circuits {
        assert!(z.iter().all(|(_, c)| c.abs() == 1));
    }
}

fn vertex_degrees(w: &ComplexWindow, z: &Chain) -> BTreeMap<usize, usize> {
    let mut deg = BTreeMap::new();
    for (e, _) in z.iter() {
        for &(v, _) in w.boundary_column(1, e) {
            *deg.entry(v).or_insert(0) += 1;
        }
    }
    deg
}

fn check_decomposition(w: &ComplexWindow, z: &Chain) {
    let d = circuit_decompose(w, z).unwrap();
    let mut sum = Chain::zero(1);
    for p in &d.parts {
        assert!(p.is_cycle(w).unwrap());
        assert!(p.iter().all(|(_, c)| c.abs() == 1));
        assert!(vertex_degrees(w, p).values().all(|&n| n == 2 || n == 1));
        sum = &sum + p;
    }
    assert_eq!(&sum, z);
    assert_eq!(d.total_length, z.l1_norm());
    assert_eq!(d.parts.iter().map(|p| p.l1_norm()).sum::<u64>(), z.l1_norm());
}

#[test]
fn circuit_decomposition_examples() {
    let w = window("z2-torus", 4);
    let sq = rectangle(&w, 0, 0, 1, 1);
    let d = circuit_decompose(&w, &sq).unwrap();
    assert_eq!(d.parts.len(), 1);
    assert_eq!(d.parts[0].l1_norm(), 4);

    let eight = &rectangle(&w, 0, 0, 1, 1) + &rectangle(&w, 1, 1, 1, 1);
    let d = circuit_decompose(&w, &eight).unwrap();
    assert_eq!(d.parts.len(), 2);
    assert!(d.parts.iter().all(|p| p.l1_norm() == 4));
    assert_eq!(d.total_length, 8);
    check_decomposition(&w, &eight);

    let double = sq.scale(2);
    let d = circuit_decompose(&w, &double).unwrap();
    assert_eq!(d.parts.len(), 2);
    assert_eq!(d.parts[0], d.parts[1]);
    assert_eq!(d.parts[0], sq);

    assert!(circuit_decompose(&w, &Chain::zero(1)).unwrap().parts.is_empty());
    assert!(circuit_decompose(&w, &chain(&w, 1, &[(1, "ex", "")])).is_err());
}

#[test]
fn random_circuit_decompositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let windows = [window("z2-torus", 3), window("heisenberg3", 2), window("z2-redundant", 2), window("gersten(2)", 0)];
    let mut done = 0;
    while done < 500 {
        let w = &windows[rng.gen_range(0..windows.len())];
        let cells: Vec<usize> = (0..w.cell_count(2)).filter(|&i| !w.is_clipped(2, i)).collect();
        let z = random_chain(&mut rng, 2, &cells, 4).boundary(w).unwrap();
        if z.is_zero() || z.iter().any(|(e, _)| w.is_clipped(1, e)) {
            continue;
        }
        check_decomposition(w, &z);
        done += 1;
    }
}
