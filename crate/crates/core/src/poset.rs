//! Finite posets on the ground set `0..n` with bitmask relations.

use std::fmt;

use crate::error::{Error, Result};
use crate::set::{ElementSet, MAX_ELEMENTS};

/// A finite poset. Immutable after construction.
///
/// `above[x]` holds every `y` with `x < y` and `below[x]` every `y` with
/// `y < x`; the cover masks are derived from them.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    n: usize,
    above: Vec<u64>,
    below: Vec<u64>,
    upper_covers: Vec<u64>,
    lower_covers: Vec<u64>,
}

impl Poset {
    /// Build from a transitively closed, acyclic `above` table.
    fn from_closed_above(n: usize, above: Vec<u64>) -> Self {
        let mut below = vec![0u64; n];
        for (x, &up) in above.iter().enumerate() {
            for y in ElementSet(up) {
                below[y] |= 1 << x;
            }
        }
        let upper_covers: Vec<u64> = (0..n)
            .map(|x| {
                let indirect = ElementSet(above[x]).iter().fold(0u64, |m, y| m | above[y]);
                above[x] & !indirect
            })
            .collect();
        let mut lower_covers = vec![0u64; n];
        for (x, &up) in upper_covers.iter().enumerate() {
            for y in ElementSet(up) {
                lower_covers[y] |= 1 << x;
            }
        }
        Poset { n, above, below, upper_covers, lower_covers }
    }

    /// Transitive closure of `pairs` (each `(low, high)` meaning `low < high`).
    /// Pairs need not be covers.
    pub fn from_cover_relations(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_ELEMENTS {
            return Err(Error::SizeCapExceeded { what: "element count", size: n, cap: MAX_ELEMENTS });
        }
        let mut reach = vec![0u64; n];
        for &(lo, hi) in pairs {
            for v in [lo, hi] {
                if v >= n {
                    return Err(Error::Index { index: v, n });
                }
            }
            reach[lo] |= 1 << hi;
        }
        close(&mut reach);
        if let Some(x) = (0..n).find(|&x| reach[x] >> x & 1 == 1) {
            return Err(Error::Cycle { element: x });
        }
        Ok(Self::from_closed_above(n, reach))
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_closed_above(n, vec![0; n])
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let above = (0..n).map(|x| ElementSet::full(n).mask() & !ElementSet::full(x + 1).mask()).collect();
        Self::from_closed_above(n, above)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> ElementSet {
        ElementSet::full(self.n)
    }

    pub fn check_index(&self, x: usize) -> Result<()> {
        if x < self.n {
            Ok(())
        } else {
            Err(Error::Index { index: x, n: self.n })
        }
    }

    /// `x < y` in the poset.
    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.above[x] >> y & 1 == 1
    }

    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.lt(x, y) || self.lt(y, x)
    }

    /// `y` covers `x`.
    #[inline]
    pub fn covers(&self, x: usize, y: usize) -> bool {
        self.upper_covers[x] >> y & 1 == 1
    }

    /// Elements strictly below `x`.
    #[inline]
    pub fn below(&self, x: usize) -> ElementSet {
        ElementSet(self.below[x])
    }

    /// Elements strictly above `x`.
    #[inline]
    pub fn above(&self, x: usize) -> ElementSet {
        ElementSet(self.above[x])
    }

    #[inline]
    pub fn upper_covers(&self, x: usize) -> ElementSet {
        ElementSet(self.upper_covers[x])
    }

    #[inline]
    pub fn lower_covers(&self, x: usize) -> ElementSet {
        ElementSet(self.lower_covers[x])
    }

    /// Elements comparable to neither side of `x` (excluding `x`).
    pub fn incomparable(&self, x: usize) -> ElementSet {
        ElementSet(self.ground().mask() & !(self.above[x] | self.below[x] | 1 << x))
    }

    /// All strict relations `(x, y)` with `x < y`, sorted.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|x| self.above(x).iter().map(move |y| (x, y))).collect()
    }

    /// Cover relations `(x, y)` with `y` covering `x`, sorted.
    pub fn cover_relations(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|x| self.upper_covers(x).iter().map(move |y| (x, y))).collect()
    }

    pub fn relation_count(&self) -> usize {
        self.above.iter().map(|m| m.count_ones() as usize).sum()
    }

    pub fn dual(&self) -> Poset {
        Poset {
            n: self.n,
            above: self.below.clone(),
            below: self.above.clone(),
            upper_covers: self.lower_covers.clone(),
            lower_covers: self.upper_covers.clone(),
        }
    }

    /// Induced subposet on `keep`, relabelled `0..|keep|` in increasing original index.
    pub fn induced(&self, keep: ElementSet) -> Poset {
        let old: Vec<usize> = keep.iter().filter(|&x| x < self.n).collect();
        let mut pos = [usize::MAX; MAX_ELEMENTS];
        for (i, &x) in old.iter().enumerate() {
            pos[x] = i;
        }
        let above = old
            .iter()
            .map(|&x| {
                ElementSet(self.above[x] & keep.mask()).iter().fold(0u64, |m, y| m | 1 << pos[y])
            })
            .collect();
        Self::from_closed_above(old.len(), above)
    }

    /// `P - x`, relabelled order-preservingly by original index.
    pub fn delete(&self, x: usize) -> Result<Poset> {
        self.check_index(x)?;
        Ok(self.induced(self.ground().without(x)))
    }

    /// Smallest partial order containing this one and `x < y`.
    pub fn add_relation(&self, x: usize, y: usize) -> Result<Poset> {
        self.check_index(x)?;
        self.check_index(y)?;
        if x == y || self.lt(y, x) {
            return Err(Error::InconsistentRelation { low: x, high: y });
        }
        if self.lt(x, y) {
            return Ok(self.clone());
        }
        let mut above = self.above.clone();
        let new_above = self.above[y] | 1 << y;
        for z in self.below(x).with(x) {
            above[z] |= new_above;
        }
        Ok(Self::from_closed_above(self.n, above))
    }

    /// Adds the chain `seq[0] < seq[1] < ...`.
    pub fn add_chain(&self, seq: &[usize]) -> Result<Poset> {
        let mut p = self.clone();
        for w in seq.windows(2) {
            p = p.add_relation(w[0], w[1])?;
        }
        Ok(p)
    }

    /// Disjoint union; `other`'s elements are shifted by `self.n()`.
    pub fn parallel_sum(&self, other: &Poset) -> Result<Poset> {
        self.sum(other, false)
    }

    /// Disjoint union with every element of `self` below every element of `other`.
    pub fn series_sum(&self, other: &Poset) -> Result<Poset> {
        self.sum(other, true)
    }

    fn sum(&self, other: &Poset, series: bool) -> Result<Poset> {
        let n = self.n + other.n;
        if n > MAX_ELEMENTS {
            return Err(Error::SizeCapExceeded { what: "element count", size: n, cap: MAX_ELEMENTS });
        }
        let shift = self.n;
        let upper = if series { ElementSet::full(n).mask() & !ElementSet::full(shift).mask() } else { 0 };
        let mut above: Vec<u64> = self.above.iter().map(|&m| m | upper).collect();
        above.extend(other.above.iter().map(|&m| m << shift));
        Ok(Self::from_closed_above(n, above))
    }

    /// Relabel so that new element `i` is old element `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Poset {
        debug_assert_eq!(order.len(), self.n);
        let mut pos = vec![0usize; self.n];
        for (i, &x) in order.iter().enumerate() {
            pos[x] = i;
        }
        let above = order
            .iter()
            .map(|&x| self.above(x).iter().fold(0u64, |m, y| m | 1 << pos[y]))
            .collect();
        Self::from_closed_above(self.n, above)
    }

    pub fn is_chain(&self) -> bool {
        (0..self.n).all(|x| self.incomparable(x).is_empty())
    }

    pub fn is_antichain(&self, set: ElementSet) -> bool {
        set.iter().all(|x| self.above[x] & set.mask() == 0)
    }

    /// Whether `set` is totally ordered.
    pub fn is_chain_set(&self, set: ElementSet) -> bool {
        set.iter().all(|x| (self.above[x] | self.below[x] | 1 << x) & set.mask() == set.mask())
    }

    pub fn is_ideal(&self, set: ElementSet) -> bool {
        set.iter().all(|x| self.below[x] & !set.mask() == 0)
    }

    pub fn is_filter(&self, set: ElementSet) -> bool {
        set.iter().all(|x| self.above[x] & !set.mask() == 0)
    }

    pub fn min_set(&self) -> ElementSet {
        (0..self.n).filter(|&x| self.below[x] == 0).collect()
    }

    pub fn max_set(&self) -> ElementSet {
        (0..self.n).filter(|&x| self.above[x] == 0).collect()
    }

    /// Maximal elements of `set` within the induced order.
    pub fn max_of(&self, set: ElementSet) -> ElementSet {
        set.iter().filter(|&x| self.above[x] & set.mask() == 0).collect()
    }

    /// Minimal elements of `set` within the induced order.
    pub fn min_of(&self, set: ElementSet) -> ElementSet {
        set.iter().filter(|&x| self.below[x] & set.mask() == 0).collect()
    }

    /// `|{y : y <= x}|`.
    pub fn alpha(&self, x: usize) -> Result<usize> {
        self.check_index(x)?;
        Ok(self.below(x).len() + 1)
    }

    /// `|{y : y >= x}|`.
    pub fn beta(&self, x: usize) -> Result<usize> {
        self.check_index(x)?;
        Ok(self.above(x).len() + 1)
    }

    /// Number of elements incomparable to `x`.
    pub fn pi(&self, x: usize) -> Result<usize> {
        self.check_index(x)?;
        Ok(self.incomparable(x).len())
    }

    pub fn ideal_closure(&self, set: ElementSet) -> ElementSet {
        set.iter().fold(set, |acc, x| acc.union(self.below(x)))
    }

    pub fn filter_closure(&self, set: ElementSet) -> ElementSet {
        set.iter().fold(set, |acc, x| acc.union(self.above(x)))
    }

    /// Elements in an order where every element follows everything below it.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&x| (self.below(x).len(), x));
        order
    }

    /// `level[x]` = number of elements in a longest chain ending at `x`.
    pub fn levels(&self) -> Vec<usize> {
        let mut level = vec![0usize; self.n];
        for x in self.topological_order() {
            level[x] = 1 + self.lower_covers(x).iter().map(|y| level[y]).max().unwrap_or(0);
        }
        level
    }

    /// Size of a longest chain.
    pub fn height(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    /// Partition into antichains by level (the `k`-th holds elements whose
    /// longest chain from below has `k + 1` elements).
    pub fn level_antichains(&self) -> Vec<ElementSet> {
        let levels = self.levels();
        let mut out = vec![ElementSet::EMPTY; self.height()];
        for (x, &l) in levels.iter().enumerate() {
            out[l - 1] = out[l - 1].with(x);
        }
        out
    }

    /// Maximum matching in the bipartite split `x_L -- y_R` for `x < y`.
    /// Returns `mate_right[y] = Some(x)`.
    fn comparability_matching(&self) -> Vec<Option<usize>> {
        fn augment(p: &Poset, x: usize, seen: &mut u64, mate: &mut [Option<usize>]) -> bool {
            for y in p.above(x) {
                if *seen >> y & 1 == 1 {
                    continue;
                }
                *seen |= 1 << y;
                if mate[y].is_none_or(|x2| augment(p, x2, seen, mate)) {
                    mate[y] = Some(x);
                    return true;
                }
            }
            false
        }
        let mut mate = vec![None; self.n];
        for x in 0..self.n {
            let mut seen = 0u64;
            augment(self, x, &mut seen, &mut mate);
        }
        mate
    }

    /// Size of a largest antichain, via Dilworth: `n` minus a maximum matching.
    pub fn width(&self) -> usize {
        self.n - self.comparability_matching().iter().filter(|m| m.is_some()).count()
    }

    /// A minimum chain cover (each chain listed bottom to top).
    pub fn chain_cover(&self) -> Vec<Vec<usize>> {
        let mate = self.comparability_matching();
        let mut next = vec![None; self.n];
        let mut has_pred = vec![false; self.n];
        for (y, m) in mate.iter().enumerate() {
            if let Some(x) = *m {
                next[x] = Some(y);
                has_pred[y] = true;
            }
        }
        (0..self.n)
            .filter(|&x| !has_pred[x])
            .map(|start| {
                let mut chain = vec![start];
                while let Some(y) = next[*chain.last().unwrap()] {
                    chain.push(y);
                }
                chain
            })
            .collect()
    }

    /// A largest antichain, read off a minimum vertex cover (König).
    pub fn max_antichain(&self) -> ElementSet {
        let mate = self.comparability_matching();
        let mut matched_left = 0u64;
        let mut mate_left = vec![None; self.n];
        for (y, m) in mate.iter().enumerate() {
            if let Some(x) = *m {
                matched_left |= 1 << x;
                mate_left[x] = Some(y);
            }
        }
        // Alternating reachability from unmatched left vertices.
        let mut z_left = ElementSet::full(self.n).mask() & !matched_left;
        let mut z_right = 0u64;
        let mut frontier: Vec<usize> = ElementSet(z_left).to_vec();
        while let Some(x) = frontier.pop() {
            for y in self.above(x) {
                if z_right >> y & 1 == 1 || mate_left[x] == Some(y) {
                    continue;
                }
                z_right |= 1 << y;
                if let Some(x2) = mate[y] {
                    if z_left >> x2 & 1 == 0 {
                        z_left |= 1 << x2;
                        frontier.push(x2);
                    }
                }
            }
        }
        ElementSet(z_left & !z_right)
    }

    /// Every antichain (including the empty one) of size at most `size_cap`.
    pub fn antichains(&self, size_cap: usize) -> Result<Antichains<'_>> {
        const ENUM_CAP: usize = 24;
        if self.n > ENUM_CAP {
            return Err(Error::SizeCapExceeded { what: "antichain enumeration n", size: self.n, cap: ENUM_CAP });
        }
        Ok(Antichains { poset: self, cap: size_cap, stack: Vec::new(), started: false })
    }
}

/// Warshall closure over bitmask rows: `reach[i]` gains everything reachable.
fn close(reach: &mut [u64]) {
    let n = reach.len();
    for k in 0..n {
        let rk = reach[k];
        for row in reach.iter_mut() {
            if *row >> k & 1 == 1 {
                *row |= rk;
            }
        }
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset(n={}, covers={:?})", self.n, self.cover_relations())
    }
}

/// Depth-first antichain enumeration; see [`Poset::antichains`].
pub struct Antichains<'a> {
    poset: &'a Poset,
    cap: usize,
    /// (members, members plus everything comparable to them, next candidate)
    stack: Vec<(u64, u64, usize)>,
    started: bool,
}

impl Iterator for Antichains<'_> {
    type Item = ElementSet;

    fn next(&mut self) -> Option<ElementSet> {
        if !self.started {
            self.started = true;
            self.stack.push((0, 0, 0));
            return Some(ElementSet::EMPTY);
        }
        let p = self.poset;
        while let Some(top) = self.stack.last_mut() {
            let (mask, blocked, from) = *top;
            if mask.count_ones() as usize >= self.cap {
                self.stack.pop();
                continue;
            }
            match (from..p.n).find(|&x| blocked >> x & 1 == 0) {
                Some(x) => {
                    top.2 = x + 1;
                    let m = mask | 1 << x;
                    let b = blocked | 1 << x | p.above[x] | p.below[x];
                    self.stack.push((m, b, x + 1));
                    return Some(ElementSet(m));
                }
                None => {
                    self.stack.pop();
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_poset() -> Poset {
        Poset::from_cover_relations(3, &[(0, 1), (0, 2)]).unwrap()
    }

    /// a=0 < b=1, c=2 free
    fn p3() -> Poset {
        Poset::from_cover_relations(3, &[(0, 1)]).unwrap()
    }

    #[test]
    fn closure_and_covers() {
        let v = v_poset();
        assert_eq!(v.relations(), vec![(0, 1), (0, 2)]);
        let c = Poset::from_cover_relations(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(c.lt(0, 2));
        assert!(!c.covers(0, 2));
        assert_eq!(c.cover_relations(), vec![(0, 1), (1, 2)]);
        // non-cover input is accepted, covers recomputed
        let c2 = Poset::from_cover_relations(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Poset::from_cover_relations(2, &[(0, 1), (1, 0)]), Err(Error::Cycle { element: 0 }));
        assert_eq!(Poset::from_cover_relations(2, &[(0, 2)]), Err(Error::Index { index: 2, n: 2 }));
        assert!(Poset::from_cover_relations(1, &[(0, 0)]).is_err());
    }

    #[test]
    fn dual_examples() {
        let c = Poset::chain(3);
        let d = c.dual();
        assert!(d.lt(2, 1) && d.lt(1, 0) && d.lt(2, 0));
        assert_eq!(Poset::antichain(3).dual(), Poset::antichain(3));
        let lambda = v_poset().dual();
        assert_eq!(lambda.relations(), vec![(1, 0), (2, 0)]);
        assert_eq!(lambda.dual(), v_poset());
    }

    #[test]
    fn delete_examples() {
        assert_eq!(Poset::chain(3).delete(0).unwrap(), Poset::chain(2));
        assert_eq!(v_poset().delete(0).unwrap(), Poset::antichain(2));
        assert!(matches!(v_poset().delete(3), Err(Error::Index { .. })));
    }

    #[test]
    fn add_relation_examples() {
        let v = v_poset();
        assert_eq!(v.add_relation(1, 2).unwrap(), Poset::chain(3));
        assert_eq!(v.add_relation(0, 1).unwrap(), v);
        assert!(matches!(v.add_relation(1, 0), Err(Error::InconsistentRelation { .. })));
    }

    #[test]
    fn sums() {
        assert_eq!(Poset::chain(2).series_sum(&Poset::chain(3)).unwrap(), Poset::chain(5));
        assert_eq!(Poset::chain(1).parallel_sum(&Poset::chain(1)).unwrap(), Poset::antichain(2));
        let pp = Poset::chain(2).parallel_sum(&Poset::chain(2)).unwrap();
        assert_eq!(pp.relations(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn width_examples() {
        assert_eq!(Poset::chain(5).width(), 1);
        assert_eq!(Poset::antichain(4).width(), 4);
        let v = v_poset();
        assert_eq!(v.width(), 2);
        assert_eq!(v.max_antichain(), ElementSet::from_elements([1, 2]));
        assert_eq!(v.chain_cover().len(), 2);
    }

    #[test]
    fn local_parameters() {
        let c = Poset::chain(3);
        assert_eq!((c.alpha(1).unwrap(), c.beta(1).unwrap(), c.pi(1).unwrap(), c.height()), (2, 2, 0, 3));
        let p = p3();
        assert_eq!(p.pi(0).unwrap(), 1);
        assert_eq!(p.pi(2).unwrap(), 2);
        assert!(p.pi(3).is_err());
        let v = v_poset();
        assert_eq!(v.ideal_closure(ElementSet::singleton(1)), ElementSet::from_elements([0, 1]));
        assert_eq!(v.filter_closure(ElementSet::singleton(0)), ElementSet::full(3));
        assert_eq!(v.min_set(), ElementSet::singleton(0));
        assert_eq!(v.max_set(), ElementSet::from_elements([1, 2]));
    }

    #[test]
    fn antichain_enumeration() {
        assert_eq!(Poset::antichain(3).antichains(3).unwrap().count(), 8);
        assert_eq!(Poset::chain(3).antichains(3).unwrap().count(), 4);
        let v: Vec<_> = v_poset().antichains(3).unwrap().collect();
        assert_eq!(v.len(), 5);
        assert!(v.contains(&ElementSet::from_elements([1, 2])));
        assert_eq!(Poset::antichain(4).antichains(2).unwrap().count(), 1 + 4 + 6);
        assert!(Poset::antichain(25).antichains(1).is_err());
    }

    #[test]
    fn levels_partition() {
        let v = v_poset();
        assert_eq!(v.level_antichains(), vec![ElementSet::singleton(0), ElementSet::from_elements([1, 2])]);
    }
}
