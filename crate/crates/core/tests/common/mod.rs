//! Brute-force oracles that share no code with the library's algorithms:
//! labeled orders by relation enumeration, isomorphism by trying every
//! permutation, extensions by filtering all permutations.

#![allow(dead_code)]

use itertools::Itertools;
use linext_core::Poset;
use proptest::prelude::*;

/// Strict order as a relation matrix `lt[i][j]`.
pub type Relation = Vec<Vec<bool>>;

pub fn relation(p: &Poset) -> Relation {
    (0..p.n()).map(|i| (0..p.n()).map(|j| p.lt(i, j)).collect()).collect()
}

fn is_transitive(r: &Relation) -> bool {
    let n = r.len();
    (0..n).all(|i| (0..n).all(|j| !r[i][j] || (0..n).all(|k| !r[j][k] || r[i][k])))
}

/// Every strict partial order on `{0..n}`: each unordered pair is
/// incomparable, `i < j` or `j < i`, filtered by transitivity.
pub fn labeled_orders(n: usize) -> Vec<Relation> {
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut r = vec![vec![false; n]; n];
        for &(i, j) in &pairs {
            match code % 3 {
                1 => r[i][j] = true,
                2 => r[j][i] = true,
                _ => {}
            }
            code /= 3;
        }
        if is_transitive(&r) {
            out.push(r);
        }
    }
    out
}

pub fn to_poset(r: &Relation) -> Poset {
    let n = r.len();
    let pairs: Vec<(usize, usize)> = (0..n).cartesian_product(0..n).filter(|&(i, j)| r[i][j]).collect();
    Poset::from_cover_relations(n, &pairs).unwrap()
}

fn permute(r: &Relation, perm: &[usize]) -> Relation {
    let n = r.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[perm[i]][perm[j]] = r[i][j];
        }
    }
    out
}

/// Lexicographically smallest relation matrix over all relabellings.
pub fn brute_form(r: &Relation) -> Relation {
    let n = r.len();
    (0..n).permutations(n).map(|perm| permute(r, &perm)).min().unwrap_or_default()
}

pub fn isomorphic(a: &Poset, b: &Poset) -> bool {
    a.n() == b.n() && brute_form(&relation(a)) == brute_form(&relation(b))
}

pub fn automorphisms(p: &Poset) -> usize {
    let r = relation(p);
    let n = p.n();
    (0..n).permutations(n).filter(|perm| permute(&r, perm) == r).count()
}

/// Linear extensions as sequences, by filtering all permutations.
pub fn extensions(p: &Poset) -> Vec<Vec<usize>> {
    let n = p.n();
    (0..n)
        .permutations(n)
        .filter(|seq| seq.iter().enumerate().all(|(i, &x)| seq[i + 1..].iter().all(|&y| !p.lt(y, x))))
        .collect()
}

/// `pos[x]` = 1-based position of x in `seq`.
pub fn positions(seq: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; seq.len()];
    for (i, &x) in seq.iter().enumerate() {
        pos[x] = i + 1;
    }
    pos
}

pub fn brute_width(p: &Poset) -> usize {
    let n = p.n();
    (0u64..1 << n)
        .filter(|&s| (0..n).all(|i| s >> i & 1 == 0 || (0..n).all(|j| s >> j & 1 == 0 || !p.comparable(i, j))))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Random posets on up to `max_n` elements: a random DAG on a shuffled
/// vertex order.
pub fn arb_poset(max_n: usize) -> impl Strategy<Value = Poset> {
    (1..=max_n)
        .prop_flat_map(|n| {
            let m = n * (n - 1) / 2;
            (Just(n), proptest::collection::vec(any::<bool>(), m), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
        .prop_map(|(n, bits, perm)| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .tuple_combinations()
                .zip(bits)
                .filter(|&(_, b)| b)
                .map(|((i, j), _)| (perm[i], perm[j]))
                .collect();
            Poset::from_cover_relations(n, &pairs).unwrap()
        })
}
