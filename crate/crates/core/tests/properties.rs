#![allow(clippy::needless_range_loop)]

mod common;

use common::{arb_poset, brute_width};
use linext_core::balance::{delta, delta_k, delta_matrix, gap, is_diffuse};
use linext_core::families::{example_11_2, h_formula_11_2, komlos_chains};
use linext_core::geometry::geometry_report;
use linext_core::lattice::{count_extensions, DEFAULT_IDEAL_CAP};
use linext_core::rational::{from_int, inv_e_lower, ratio};
use linext_core::sampler::{rng, sample_extension_exact};
use linext_core::{exact_stats, Caps, ElementSet, IdealLattice, Rational};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn log_concave(seq: &[Rational]) -> bool {
    seq.windows(3).all(|w| &w[1] * &w[1] >= &w[0] * &w[2])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dual_properties(p in arb_poset(8)) {
        let d = p.dual();
        prop_assert_eq!(&d.dual(), &p);
        prop_assert_eq!(d.width(), p.width());
        prop_assert_eq!(d.height(), p.height());
        for x in 0..p.n() {
            prop_assert_eq!(d.pi(x).unwrap(), p.pi(x).unwrap());
        }
    }

    #[test]
    fn width_dilworth(p in arb_poset(7)) {
        let w = brute_width(&p);
        prop_assert_eq!(p.width(), w);
        prop_assert_eq!(p.max_antichain().len(), w);
        prop_assert!(p.is_antichain(p.max_antichain()));
        let cover = p.chain_cover();
        prop_assert_eq!(cover.len(), w);
        let mut seen = ElementSet::default();
        for c in &cover {
            prop_assert!(c.windows(2).all(|s| p.lt(s[0], s[1])));
            for &x in c {
                prop_assert!(!seen.contains(x));
                seen = seen.with(x);
            }
        }
        prop_assert_eq!(seen, p.ground());
    }

    #[test]
    fn add_relation_monotone(p in arb_poset(8), x in 0usize..8, y in 0usize..8) {
        let (x, y) = (x % p.n(), y % p.n());
        if x != y && !p.lt(y, x) {
            prop_assert!(p.add_relation(x, y).unwrap().relation_count() >= p.relation_count());
        }
    }

    #[test]
    fn rank_and_difference_log_concave(p in arb_poset(7)) {
        let s = exact_stats(&p, Caps::default()).unwrap();
        for x in 0..p.n() {
            prop_assert!(log_concave(&s.rank_dist[x]));
            for y in 0..p.n() {
                if x != y {
                    prop_assert!(log_concave(&s.differences().unwrap().sequence(x, y)));
                }
            }
        }
    }

    #[test]
    fn lsks_bounds(p in arb_poset(7)) {
        let s = exact_stats(&p, Caps::default()).unwrap();
        let diff = s.differences().unwrap();
        for x in 0..p.n() {
            let first = &s.rank_dist[x][0];
            if !first.is_zero() {
                prop_assert!(s.h[x] <= first.recip());
            }
            for y in 0..p.n() {
                let one = diff.probability(x, y, 1);
                if x != y && !one.is_zero() {
                    prop_assert!(&s.h[y] - &s.h[x] <= one.recip());
                }
            }
        }
    }

    #[test]
    fn window_inequalities(p in arb_poset(7)) {
        let s = exact_stats(&p, Caps::default()).unwrap();
        let win = s.win().unwrap();
        for x in 0..p.n() {
            let alpha = from_int(p.alpha(x).unwrap() as i64);
            prop_assert!(win[x] >= &s.h[x] * from_int(2) / alpha);
            for y in 0..p.n() {
                if x != y {
                    prop_assert!(s.eabsdiff().unwrap()[x][y] >= &win[x] / from_int(4));
                }
            }
        }
    }

    #[test]
    fn antichain_inequalities(p in arb_poset(7)) {
        let s = exact_stats(&p, Caps::default()).unwrap();
        let win = s.win().unwrap();
        let n = p.n() as i64;
        for a in p.antichains(64).unwrap().filter(|a| !a.is_empty()) {
            let sum: BigUint = a.iter().map(|x| count_extensions(&p.delete(x).unwrap(), DEFAULT_IDEAL_CAP).unwrap()).sum();
            prop_assert!(s.e >= sum);
            let total: Rational = a.iter().map(|x| win[x].clone()).sum();
            let k = a.len() as i64;
            prop_assert!(total >= ratio((n + 1) * k * k, n));
        }
    }

    #[test]
    fn minimal_elements_centroid_is_half_window(p in arb_poset(7)) {
        let g = geometry_report(&p, Caps::default()).unwrap();
        let win = g.win_norm().unwrap();
        for x in p.min_set() {
            prop_assert_eq!(&g.h_norm[x] * from_int(2), win[x].clone());
        }
    }

    #[test]
    fn balance_properties(p in arb_poset(7)) {
        let s = exact_stats(&p, Caps::default()).unwrap();
        let m = delta_matrix(&s);
        for x in 0..p.n() {
            for y in 0..p.n() {
                prop_assert_eq!(&m[x][y], &m[y][x]);
                if x != y && s.h[x] <= s.h[y] {
                    prop_assert!(s.prec[x][y] >= inv_e_lower());
                }
            }
        }
        let (d, _) = delta(&m);
        if p.n() >= 2 {
            let (d2, _) = delta_k(&p, p.ground(), 2, u64::MAX, DEFAULT_IDEAL_CAP).unwrap();
            prop_assert_eq!(&d2, &d);
        }
        let sd = exact_stats(&p.dual(), Caps::default()).unwrap();
        prop_assert_eq!(gap(&sd.h), gap(&s.h));
    }

    #[test]
    fn diffuse_implies_balanced_pair(p in arb_poset(7), eps_num in 1i64..6) {
        let eps = ratio(eps_num, 10);
        let s = exact_stats(&p, Caps::default()).unwrap();
        let lattice = IdealLattice::build(&p, DEFAULT_IDEAL_CAP).unwrap();
        let threshold = ratio(1, 2) - &eps;
        for c in p.chain_cover() {
            for x in (0..p.n()).filter(|x| !c.contains(x)) {
                if is_diffuse(&p, &lattice, x, &c, &eps).unwrap().diffuse {
                    prop_assert!(c.iter().any(|&y| s.prec[x][y].clone().min(s.prec[y][x].clone()) > threshold));
                }
            }
        }
    }

    #[test]
    fn sampler_deterministic(p in arb_poset(8), seed in any::<u64>()) {
        let lattice = IdealLattice::build(&p, DEFAULT_IDEAL_CAP).unwrap();
        let mut a = rng(seed, 0);
        let mut b = rng(seed, 0);
        for _ in 0..5 {
            prop_assert_eq!(sample_extension_exact(&p, &lattice, &mut a), sample_extension_exact(&p, &lattice, &mut b));
        }
    }

    #[test]
    fn example_11_2_formula(r in 1usize..4, a in 1usize..4, k in 1usize..4, l in 1usize..4) {
        let (sp, x) = example_11_2(r, a, k, l).unwrap();
        let s = exact_stats(&sp, Caps::default()).unwrap();
        prop_assert_eq!(s.h[x].clone(), h_formula_11_2(r as u64, a as u64, k as u64));
    }
}

#[test]
fn chain_gap_is_one() {
    for n in 1..8 {
        let s = exact_stats(&linext_core::Poset::chain(n), Caps::default()).unwrap();
        assert_eq!(gap(&s.h), Rational::one());
    }
}

#[test]
fn komlos_width_and_minima() {
    for t in 1..=5 {
        let p = komlos_chains(t).unwrap();
        assert_eq!(p.n(), (1 << (t + 1)) - 2);
        assert_eq!(p.width(), t);
        assert_eq!(p.min_set().len(), t);
    }
}
