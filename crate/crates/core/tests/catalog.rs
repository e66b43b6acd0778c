#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeSet;

use common::{automorphisms, brute_form, isomorphic, labeled_orders, relation, to_poset};
use linext_core::canonical_form;
use linext_core::families::{antichain, catalog, catalog_levels, chain};
use linext_core::rational::factorial;

const LABELED: [usize; 6] = [1, 1, 3, 19, 219, 4231];
const CLASSES: [usize; 9] = [1, 1, 2, 5, 16, 63, 318, 2045, 16999];

#[test]
fn labeled_brute_force_counts() {
    for (n, &want) in LABELED.iter().enumerate() {
        assert_eq!(labeled_orders(n).len(), want, "n = {n}");
    }
}

#[test]
fn classes_match_brute_force_dedup() {
    for n in 1..=5 {
        let brute: BTreeSet<_> = labeled_orders(n).iter().map(brute_form).collect();
        let cat = catalog(n).unwrap();
        assert_eq!(brute.len(), CLASSES[n]);
        assert_eq!(cat.len(), CLASSES[n]);
        let ours: BTreeSet<_> = cat.iter().map(|p| brute_form(&relation(p))).collect();
        assert_eq!(ours, brute, "n = {n}");
    }
}

#[test]
fn orbit_sum_reproduces_labeled_count() {
    for n in 1..=5 {
        let nf = factorial(n);
        let total: num_bigint::BigUint = catalog(n).unwrap().iter().map(|p| &nf / automorphisms(p)).sum();
        assert_eq!(total, LABELED[n].into(), "n = {n}");
    }
}

#[test]
fn no_two_classes_isomorphic() {
    for n in 1..=6 {
        let cat = catalog(n).unwrap();
        let forms: BTreeSet<_> = cat.iter().map(|p| brute_form(&relation(p))).collect();
        assert_eq!(forms.len(), cat.len(), "n = {n}");
        assert!(cat.iter().any(|p| isomorphic(p, &chain(n).unwrap())));
        assert!(cat.iter().any(|p| isomorphic(p, &antichain(n).unwrap())));
    }
}

#[test]
fn larger_class_counts() {
    let levels = catalog_levels(8).unwrap();
    let counts: Vec<usize> = levels.iter().map(Vec::len).collect();
    assert_eq!(counts, CLASSES);
}

#[test]
fn emitted_in_form_order() {
    let cat = catalog(6).unwrap();
    let forms: Vec<_> = cat.iter().map(|p| canonical_form(p).unwrap()).collect();
    assert!(forms.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn labeled_orders_are_valid_posets() {
    for r in labeled_orders(4) {
        let p = to_poset(&r);
        assert_eq!(relation(&p), r);
    }
}
