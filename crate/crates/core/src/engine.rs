//! Exact counting, enumeration and statistics of the uniform linear extension.
//!
//! An extension is an element sequence; its bijection `f` is `f(x) = position + 1`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::IdealLattice;
use crate::poset::Poset;
use crate::rational::{self, from_counts, ser, Rational};
use crate::set::ElementSet;

pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Resource caps shared by every exact computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub ideal_cap: usize,
    pub enum_cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { ideal_cap: crate::lattice::DEFAULT_IDEAL_CAP, enum_cap: DEFAULT_ENUM_CAP }
    }
}

/// `counts[x][k-1]` = number of extensions with `f(x) = k`.
pub fn rank_counts(p: &Poset, lattice: &IdealLattice) -> Vec<Vec<BigUint>> {
    let n = p.n();
    let mut counts = vec![vec![BigUint::zero(); n]; n];
    for (i, &ideal) in lattice.ideals().iter().enumerate() {
        if ideal.is_empty() {
            continue;
        }
        let k = ideal.len();
        let up = lattice.up_at(i);
        for x in p.max_of(ideal) {
            let below = lattice.down(ideal.without(x)).expect("ideal minus a maximal element");
            counts[x][k - 1] += below * up;
        }
    }
    counts
}

/// `Pr(f(x) = k)` for `k = 1..=n` (index `k - 1`).
pub fn rank_distribution(p: &Poset, x: usize, ideal_cap: usize) -> Result<Vec<Rational>> {
    p.check_index(x)?;
    let lattice = IdealLattice::build(p, ideal_cap)?;
    let e = lattice.count().clone();
    Ok(rank_counts(p, &lattice).swap_remove(x).iter().map(|c| from_counts(c, &e)).collect())
}

/// `counts[x][y]` = number of extensions in which `x` precedes `y`, read
/// off the lattice at the step where `y` is placed.
pub fn precedence_counts(p: &Poset, lattice: &IdealLattice) -> Vec<Vec<BigUint>> {
    let n = p.n();
    let mut counts = vec![vec![BigUint::zero(); n]; n];
    for (i, &ideal) in lattice.ideals().iter().enumerate() {
        let down = lattice.down_at(i);
        for y in p.min_of(p.ground().difference(ideal)) {
            let term = down * lattice.up(ideal.with(y)).expect("ideal plus a minimal element");
            for x in ideal {
                counts[x][y] += &term;
            }
        }
    }
    counts
}

/// `Pr(x ≺ y)` = `e(P + x<y) / e(P)`.
pub fn precedence_probability(p: &Poset, x: usize, y: usize, ideal_cap: usize) -> Result<Rational> {
    p.check_index(x)?;
    p.check_index(y)?;
    if x == y {
        return Err(Error::InvalidArgument("precedence needs distinct elements".into()));
    }
    if p.lt(x, y) {
        return Ok(rational::from_int(1));
    }
    if p.lt(y, x) {
        return Ok(rational::from_int(0));
    }
    let e = IdealLattice::build(p, ideal_cap)?.count().clone();
    let ex = IdealLattice::build(&p.add_relation(x, y)?, ideal_cap)?.count().clone();
    Ok(from_counts(&ex, &e))
}

/// Probability that `seq` appears in exactly this relative order.
pub fn order_probability(p: &Poset, seq: &[usize], ideal_cap: usize) -> Result<Rational> {
    validate_sequence(p, seq)?;
    let e = IdealLattice::build(p, ideal_cap)?.count().clone();
    match p.add_chain(seq) {
        Ok(q) => {
            let c = IdealLattice::build(&q, ideal_cap)?.count().clone();
            Ok(from_counts(&c, &e))
        }
        Err(Error::InconsistentRelation { .. }) => Ok(rational::from_int(0)),
        Err(err) => Err(err),
    }
}

fn validate_sequence(p: &Poset, seq: &[usize]) -> Result<()> {
    if seq.len() < 2 || seq.len() > p.n() {
        return Err(Error::InvalidArgument(format!(
            "order sequence length {} outside 2..={}",
            seq.len(),
            p.n()
        )));
    }
    let mut seen = ElementSet::EMPTY;
    for &x in seq {
        p.check_index(x)?;
        if seen.contains(x) {
            return Err(Error::InvalidArgument(format!("element {x} repeated in sequence")));
        }
        seen = seen.with(x);
    }
    Ok(())
}

/// Counts of every relative order of `ys` in a single lattice pass.
/// Keys are orderings of `ys` (as element sequences); absent orders have count 0.
pub fn order_counts(p: &Poset, lattice: &IdealLattice, ys: &[usize]) -> HashMap<Vec<usize>, BigUint> {
    let y_set = ElementSet::from_elements(ys.iter().copied());
    // Each state is the sequence of `ys`-members already placed, packed as
    // 4-bit indices into `ys` (|ys| <= 15).
    assert!(ys.len() <= 15, "order_counts supports at most 15 tracked elements");
    let mut pos_in_y = [usize::MAX; 64];
    for (i, &y) in ys.iter().enumerate() {
        pos_in_y[y] = i;
    }
    let mut states: Vec<HashMap<u64, BigUint>> = vec![HashMap::new(); lattice.len()];
    states[0].insert(0, BigUint::from(1u32));
    let last = lattice.len() - 1;
    for i in 0..last {
        let ideal = lattice.ideals()[i];
        let current = std::mem::take(&mut states[i]);
        let placed_y = ideal.intersection(y_set).len();
        for x in p.min_of(p.ground().difference(ideal)) {
            let j = lattice.index_of(ideal.with(x)).expect("ideal plus a minimal element");
            for (&code, count) in &current {
                let next = if y_set.contains(x) { code | (pos_in_y[x] as u64) << (4 * placed_y) } else { code };
                *states[j].entry(next).or_default() += count;
            }
        }
    }
    states[last]
        .iter()
        .map(|(&code, c)| {
            let order = (0..ys.len()).map(|k| ys[(code >> (4 * k) & 0xf) as usize]).collect();
            (order, c.clone())
        })
        .collect()
}

/// Lexicographic enumeration of linear extensions.
pub struct Extensions<'a> {
    poset: &'a Poset,
    seq: Vec<usize>,
    placed: u64,
    started: bool,
    done: bool,
}

impl<'a> Extensions<'a> {
    fn new(poset: &'a Poset) -> Self {
        Extensions { poset, seq: Vec::with_capacity(poset.n()), placed: 0, started: false, done: false }
    }

    fn available_from(&self, from: usize) -> Option<usize> {
        (from..self.poset.n())
            .find(|&x| self.placed >> x & 1 == 0 && self.poset.below(x).mask() & !self.placed == 0)
    }

    fn descend(&mut self) {
        while self.seq.len() < self.poset.n() {
            let x = self.available_from(0).expect("a poset always has a minimal element");
            self.seq.push(x);
            self.placed |= 1 << x;
        }
    }
}

impl Iterator for Extensions<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend();
            return Some(self.seq.clone());
        }
        while let Some(x) = self.seq.pop() {
            self.placed &= !(1 << x);
            if let Some(y) = self.available_from(x + 1) {
                self.seq.push(y);
                self.placed |= 1 << y;
                self.descend();
                return Some(self.seq.clone());
            }
        }
        self.done = true;
        None
    }
}

/// Every linear extension exactly once, in lexicographic order.
pub fn enumerate_extensions(p: &Poset, cap: u64, ideal_cap: usize) -> Result<Extensions<'_>> {
    let e = crate::lattice::count_extensions(p, ideal_cap)?;
    if e > BigUint::from(cap) {
        return Err(Error::EnumCapExceeded { count: e.to_string(), cap });
    }
    Ok(Extensions::new(p))
}

/// The lexicographically first extension (greedy smallest minimal element).
pub fn first_extension(p: &Poset) -> Vec<usize> {
    Extensions::new(p).next().expect("every poset has an extension")
}

/// `q(x)` and `r(x)` for one extension given `f` as 1-based positions.
#[inline]
pub fn window_endpoints(p: &Poset, f: &[usize], x: usize) -> (usize, usize) {
    let q = p.below(x).iter().map(|y| f[y]).max().unwrap_or(0);
    let r = p.above(x).iter().map(|y| f[y]).min().unwrap_or(p.n() + 1);
    (q, r)
}

/// Distribution of `f(y) - f(x)` over positive gaps, by enumeration.
#[derive(Debug, Clone)]
pub struct DifferenceCounts {
    n: usize,
    e: u64,
    /// `counts[(x * n + y) * n + k]` = #{extensions with f(y) - f(x) = k}, `1 <= k < n`.
    counts: Vec<u64>,
}

impl DifferenceCounts {
    pub fn count(&self, x: usize, y: usize, k: usize) -> u64 {
        if k == 0 || k >= self.n {
            0
        } else {
            self.counts[(x * self.n + y) * self.n + k]
        }
    }

    /// `Pr(f(y) - f(x) = k)`.
    pub fn probability(&self, x: usize, y: usize, k: usize) -> Rational {
        rational::ratio(self.count(x, y, k) as i64, self.e as i64)
    }

    /// The sequence `Pr(f(y) - f(x) = k)` for `k = 1..n`.
    pub fn sequence(&self, x: usize, y: usize) -> Vec<Rational> {
        (1..self.n).map(|k| self.probability(x, y, k)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionStats {
    pub n: usize,
    #[serde(serialize_with = "ser::biguint")]
    pub e: BigUint,
    /// Average height `h(x) = E f(x)`.
    #[serde(serialize_with = "ser::rationals")]
    pub h: Vec<Rational>,
    /// `rank_dist[x][k-1] = Pr(f(x) = k)`.
    #[serde(serialize_with = "ser::rational_matrix")]
    pub rank_dist: Vec<Vec<Rational>>,
    /// `prec[x][y] = Pr(x ≺ y)`; the diagonal is 0.
    #[serde(serialize_with = "ser::rational_matrix")]
    pub prec: Vec<Vec<Rational>>,
    #[serde(serialize_with = "ser::rationals")]
    pub sigma2: Vec<Rational>,
    /// `E[r(x) - q(x)]`; absent beyond the enumeration cap.
    #[serde(serialize_with = "ser::opt_rationals")]
    pub win: Option<Vec<Rational>>,
    /// `E|f(x) - f(y)|`; absent beyond the enumeration cap.
    #[serde(serialize_with = "ser::opt_rational_matrix")]
    pub eabsdiff: Option<Vec<Vec<Rational>>>,
    #[serde(skip)]
    pub differences: Option<DifferenceCounts>,
}

impl ExtensionStats {
    pub fn win(&self) -> Result<&[Rational]> {
        self.win.as_deref().ok_or(Error::StatUnavailable("win needs full enumeration"))
    }

    pub fn eabsdiff(&self) -> Result<&[Vec<Rational>]> {
        self.eabsdiff.as_deref().ok_or(Error::StatUnavailable("E|f(x)-f(y)| needs full enumeration"))
    }

    pub fn differences(&self) -> Result<&DifferenceCounts> {
        self.differences.as_ref().ok_or(Error::StatUnavailable("difference distribution needs full enumeration"))
    }
}

pub fn exact_stats(p: &Poset, caps: Caps) -> Result<ExtensionStats> {
    let lattice = IdealLattice::build(p, caps.ideal_cap)?;
    Ok(exact_stats_with(p, &lattice, caps.enum_cap))
}

/// Lattice-derived statistics, plus enumeration-only ones when `e(P) <= enum_cap`.
pub fn exact_stats_with(p: &Poset, lattice: &IdealLattice, enum_cap: u64) -> ExtensionStats {
    let n = p.n();
    let e = lattice.count().clone();
    let ranks = rank_counts(p, lattice);
    let rank_dist: Vec<Vec<Rational>> =
        ranks.iter().map(|row| row.iter().map(|c| from_counts(c, &e)).collect()).collect();
    let mut h = Vec::with_capacity(n);
    let mut sigma2 = Vec::with_capacity(n);
    for row in &rank_dist {
        let mut m1 = Rational::zero();
        let mut m2 = Rational::zero();
        for (i, pk) in row.iter().enumerate() {
            let k = rational::from_int(i as i64 + 1);
            m1 += pk * &k;
            m2 += pk * &k * &k;
        }
        sigma2.push(&m2 - &m1 * &m1);
        h.push(m1);
    }
    let pc = precedence_counts(p, lattice);
    let prec = (0..n)
        .map(|x| (0..n).map(|y| if x == y { Rational::zero() } else { from_counts(&pc[x][y], &e) }).collect())
        .collect();

    let (win, eabsdiff, differences) = match e.to_u64() {
        Some(e64) if e64 <= enum_cap => {
            let (w, d, diff) = enumeration_stats(p, e64);
            (Some(w), Some(d), Some(diff))
        }
        _ => (None, None, None),
    };
    ExtensionStats { n, e, h, rank_dist, prec, sigma2, win, eabsdiff, differences }
}

fn enumeration_stats(p: &Poset, e: u64) -> (Vec<Rational>, Vec<Vec<Rational>>, DifferenceCounts) {
    let n = p.n();
    let mut win_sum = vec![0u128; n];
    let mut abs_sum = vec![0u128; n * n];
    let mut counts = vec![0u64; n * n * n.max(1)];
    let mut f = vec![0usize; n];
    for seq in Extensions::new(p) {
        for (i, &x) in seq.iter().enumerate() {
            f[x] = i + 1;
        }
        for x in 0..n {
            let (q, r) = window_endpoints(p, &f, x);
            win_sum[x] += (r - q) as u128;
            for y in 0..n {
                if f[y] > f[x] {
                    let d = f[y] - f[x];
                    abs_sum[x * n + y] += d as u128;
                    abs_sum[y * n + x] += d as u128;
                    counts[(x * n + y) * n + d] += 1;
                }
            }
        }
    }
    let big = |v: u128| Rational::new(v.into(), e.into());
    let win = win_sum.into_iter().map(big).collect();
    let eabs = (0..n).map(|x| (0..n).map(|y| big(abs_sum[x * n + y])).collect()).collect();
    (win, eabs, DifferenceCounts { n, e, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p3() -> Poset {
        Poset::from_cover_relations(3, &[(0, 1)]).unwrap()
    }

    fn v_poset() -> Poset {
        Poset::from_cover_relations(3, &[(0, 1), (0, 2)]).unwrap()
    }

    const CAP: usize = 1 << 16;

    #[test]
    fn rank_distribution_examples() {
        let one = ratio(1, 1);
        let zero = ratio(0, 1);
        assert_eq!(rank_distribution(&v_poset(), 0, CAP).unwrap(), vec![one, zero.clone(), zero]);
        assert_eq!(rank_distribution(&p3(), 2, CAP).unwrap(), vec![ratio(1, 3); 3]);
        assert_eq!(rank_distribution(&Poset::antichain(2), 1, CAP).unwrap(), vec![ratio(1, 2); 2]);
    }

    #[test]
    fn precedence_examples() {
        assert_eq!(precedence_probability(&p3(), 2, 0, CAP).unwrap(), ratio(1, 3));
        assert_eq!(precedence_probability(&Poset::antichain(2), 0, 1, CAP).unwrap(), ratio(1, 2));
        assert_eq!(precedence_probability(&Poset::chain(4), 0, 3, CAP).unwrap(), ratio(1, 1));
        assert!(precedence_probability(&p3(), 1, 1, CAP).is_err());
    }

    #[test]
    fn order_probability_examples() {
        let a3 = Poset::antichain(3);
        assert_eq!(order_probability(&a3, &[2, 0, 1], CAP).unwrap(), ratio(1, 6));
        assert_eq!(order_probability(&p3(), &[1, 0], CAP).unwrap(), ratio(0, 1));
        assert_eq!(order_probability(&v_poset(), &[1, 2], CAP).unwrap(), ratio(1, 2));
        assert!(order_probability(&a3, &[0], CAP).is_err());
        assert!(order_probability(&a3, &[0, 0], CAP).is_err());
    }

    #[test]
    fn order_counts_matches_order_probability() {
        let p = Poset::from_cover_relations(5, &[(0, 2), (1, 2), (1, 3)]).unwrap();
        let l = IdealLattice::build(&p, CAP).unwrap();
        let ys = [0, 3, 4];
        let counts = order_counts(&p, &l, &ys);
        let mut total = BigUint::zero();
        for perm in [[0, 3, 4], [0, 4, 3], [3, 0, 4], [3, 4, 0], [4, 0, 3], [4, 3, 0]] {
            let c = counts.get(perm.as_slice()).cloned().unwrap_or_default();
            assert_eq!(from_counts(&c, l.count()), order_probability(&p, &perm, CAP).unwrap());
            total += c;
        }
        assert_eq!(&total, l.count());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_extensions(&Poset::chain(3), 10, CAP).unwrap().count(), 1);
        assert_eq!(enumerate_extensions(&Poset::antichain(3), 10, CAP).unwrap().count(), 6);
        // a=0 < b=1, c=2: cab, acb, abc in lexicographic order of sequences.
        let all: Vec<_> = enumerate_extensions(&p3(), 10, CAP).unwrap().collect();
        assert_eq!(all, vec![vec![0, 1, 2], vec![0, 2, 1], vec![2, 0, 1]]);
        assert!(matches!(enumerate_extensions(&Poset::antichain(4), 23, CAP), Err(Error::EnumCapExceeded { .. })));
    }

    #[test]
    fn stats_antichain_and_chain() {
        let s = exact_stats(&Poset::antichain(4), Caps::default()).unwrap();
        assert!(s.win().unwrap().iter().all(|w| *w == ratio(5, 1)));
        let s = exact_stats(&Poset::chain(4), Caps::default()).unwrap();
        assert!(s.win().unwrap().iter().all(|w| *w == ratio(2, 1)));
    }

    #[test]
    fn stats_p3() {
        let s = exact_stats(&p3(), Caps::default()).unwrap();
        assert_eq!(s.win().unwrap(), &[ratio(8, 3), ratio(8, 3), ratio(4, 1)]);
        assert_eq!(s.h, vec![ratio(4, 3), ratio(8, 3), ratio(2, 1)]);
        assert_eq!(s.sigma2[2], ratio(2, 3));
        assert_eq!(s.prec[2][0], ratio(1, 3));
        assert_eq!(s.prec[0][1], ratio(1, 1));
    }

    #[test]
    fn stats_without_enumeration() {
        let caps = Caps { enum_cap: 2, ..Caps::default() };
        let s = exact_stats(&p3(), caps).unwrap();
        assert!(s.win.is_none() && s.eabsdiff.is_none());
        assert!(matches!(s.win(), Err(Error::StatUnavailable(_))));
    }

    #[test]
    fn stats_json_uses_fraction_strings() {
        let s = exact_stats(&p3(), Caps::default()).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["e"], "3");
        assert_eq!(v["h"][0], "4/3");
        assert_eq!(v["win"][2], "4/1");
    }
}
