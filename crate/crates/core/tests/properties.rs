mod common;

use std::sync::OnceLock;

use fillnorm::chain::Chain;
use fillnorm::complex::ComplexWindow;
use fillnorm::fill::{fill_norm, FillingInstance};
use proptest::prelude::*;

use common::{caps, window};

fn inner() -> &'static ComplexWindow {
    static W: OnceLock<ComplexWindow> = OnceLock::new();
    W.get_or_init(|| window("z2-torus", 1))
}

fn outer() -> &'static ComplexWindow {
    static W: OnceLock<ComplexWindow> = OnceLock::new();
    W.get_or_init(|| window("z2-torus", 4))
}

/// Small 2-chain near the origin, lifted into the large window.
fn square_chain() -> impl Strategy<Value = Chain> {
    let n = inner().cells(2).len();
    prop::collection::vec((0..n, -2i64..=2), 0..4).prop_map(|terms| {
        let small = Chain::from_terms(2, terms);
        Chain::from_formal(outer(), 2, &small.to_formal(inner())).unwrap()
    })
}

fn fill(c: &Chain) -> u64 {
    let w = outer();
    let inst = FillingInstance::new(w, c.boundary(w).unwrap()).unwrap();
    fill_norm(&inst, &caps()).unwrap().value.expect("boundaries are fillable")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn boundary_of_boundary_vanishes(c in square_chain()) {
        let w = outer();
        let b = c.boundary(w).unwrap();
        prop_assert!(b.boundary(w).unwrap().is_zero());
    }

    #[test]
    fn fill_bounded_by_chain(c in square_chain()) {
        prop_assert!(fill(&c) <= c.l1_norm());
    }

    #[test]
    fn fill_symmetric(c in square_chain()) {
        prop_assert_eq!(fill(&c), fill(&-&c));
    }

    #[test]
    fn fill_subadditive(a in square_chain(), b in square_chain()) {
        prop_assert!(fill(&(&a + &b)) <= fill(&a) + fill(&b));
    }

    #[test]
    fn fill_scales_at_most_linearly(c in square_chain(), n in 1i64..=3) {
        prop_assert!(fill(&c.scale(n)) <= n as u64 * fill(&c));
    }

    #[test]
    fn plane_fill_is_exact(c in square_chain()) {
        prop_assert_eq!(fill(&c), c.l1_norm());
    }
}
