//! The distributive lattice of order ideals with extension counts.
//!
//! `down(I)` counts linear extensions of the subposet on `I` and `up(I)`
//! counts those of the complementary filter, so every linear extension is a
//! maximal chain `∅ = I_0 ⊂ I_1 ⊂ ... ⊂ I_n = P` and
//! `down(P) = up(∅) = e(P)`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::set::ElementSet;

pub const DEFAULT_IDEAL_CAP: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct IdealLattice {
    n: usize,
    /// Ideals sorted by size, then mask.
    ideals: Vec<ElementSet>,
    index: HashMap<u64, usize>,
    down: Vec<BigUint>,
    up: Vec<BigUint>,
}

impl IdealLattice {
    pub fn build(p: &Poset, ideal_cap: usize) -> Result<Self> {
        let n = p.n();
        let mut ideals = vec![ElementSet::EMPTY];
        let mut index = HashMap::new();
        index.insert(0u64, 0usize);
        let mut level_start = 0;
        while level_start < ideals.len() {
            let level_end = ideals.len();
            let mut next: Vec<ElementSet> = Vec::new();
            for i in level_start..level_end {
                let ideal = ideals[i];
                for x in p.ground().difference(ideal) {
                    if p.below(x).is_subset(ideal) {
                        let j = ideal.with(x);
                        if let std::collections::hash_map::Entry::Vacant(v) = index.entry(j.mask()) {
                            v.insert(usize::MAX);
                            next.push(j);
                        }
                    }
                }
            }
            next.sort();
            for j in next {
                if ideals.len() >= ideal_cap {
                    return Err(Error::IdealCapExceeded { cap: ideal_cap });
                }
                index.insert(j.mask(), ideals.len());
                ideals.push(j);
            }
            level_start = level_end;
        }

        let len = ideals.len();
        let mut down = vec![BigUint::zero(); len];
        down[0] = BigUint::one();
        for i in 0..len {
            let ideal = ideals[i];
            if down[i].is_zero() {
                continue;
            }
            let d = down[i].clone();
            for x in p.min_of(p.ground().difference(ideal)) {
                let j = index[&ideal.with(x).mask()];
                down[j] += &d;
            }
        }
        let mut up = vec![BigUint::zero(); len];
        up[len - 1] = BigUint::one();
        for i in (0..len).rev() {
            let ideal = ideals[i];
            let mut acc = BigUint::zero();
            for x in p.min_of(p.ground().difference(ideal)) {
                acc += &up[index[&ideal.with(x).mask()]];
            }
            if i != len - 1 {
                up[i] = acc;
            }
        }
        Ok(IdealLattice { n, ideals, index, down, up })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn ideals(&self) -> &[ElementSet] {
        &self.ideals
    }

    pub fn index_of(&self, ideal: ElementSet) -> Option<usize> {
        self.index.get(&ideal.mask()).copied()
    }

    pub fn contains(&self, set: ElementSet) -> bool {
        self.index.contains_key(&set.mask())
    }

    /// Extensions of the subposet on `ideal`; `None` if it is not an ideal.
    pub fn down(&self, ideal: ElementSet) -> Option<&BigUint> {
        self.index_of(ideal).map(|i| &self.down[i])
    }

    /// Extensions of the filter complementary to `ideal`.
    pub fn up(&self, ideal: ElementSet) -> Option<&BigUint> {
        self.index_of(ideal).map(|i| &self.up[i])
    }

    pub fn down_at(&self, i: usize) -> &BigUint {
        &self.down[i]
    }

    pub fn up_at(&self, i: usize) -> &BigUint {
        &self.up[i]
    }

    /// e(P).
    pub fn count(&self) -> &BigUint {
        &self.up[0]
    }

    /// Extension count of the subposet induced on a filter `filter`.
    pub fn filter_count(&self, filter: ElementSet) -> Option<&BigUint> {
        self.up(ElementSet::full(self.n).difference(filter))
    }
}

/// e(P) via the ideal lattice.
pub fn count_extensions(p: &Poset, ideal_cap: usize) -> Result<BigUint> {
    Ok(IdealLattice::build(p, ideal_cap)?.count().clone())
}
