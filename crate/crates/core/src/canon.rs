//! Canonical labelling for isomorphism dedup.
//!
//! Elements are first split into cells by an iterated invariant refinement
//! (strict down/up degree and cover degrees, then the multisets of
//! neighbouring cells). Cells occupy consecutive positions in a fixed order,
//! and within that constraint a depth-first search picks the labelling whose
//! relation matrix is lexicographically smallest. The matrix is read one
//! leading principal block at a time: position `k` contributes its relation
//! to positions `0..k`, so a partial labelling fixes a prefix of the code and
//! dominated branches are cut early. Interchangeable twins (equal up- and
//! down-sets) are tried only once per branch.

use crate::error::{Error, Result};
use crate::poset::Poset;

pub const CANONICAL_MAX_N: usize = 10;

/// Canonical byte string: `n`, then one symbol per pair `(k, j)`, `j < k`,
/// with 0 = incomparable, 1 = `j < k`, 2 = `k < j` (positions after relabelling).
pub type CanonicalForm = Vec<u8>;

pub fn canonical_form(p: &Poset) -> Result<CanonicalForm> {
    Ok(canonical_labeling(p)?.0)
}

/// Canonical form plus the labelling realizing it (`order[i]` is the
/// original element placed at position `i`).
pub fn canonical_labeling(p: &Poset) -> Result<(CanonicalForm, Vec<usize>)> {
    let n = p.n();
    if n > CANONICAL_MAX_N {
        return Err(Error::SizeCapExceeded { what: "canonical form n", size: n, cap: CANONICAL_MAX_N });
    }
    let colors = refine(p);
    let mut cell_of_pos = Vec::with_capacity(n);
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by_key(|&x| colors[x]);
    for &x in &sorted {
        cell_of_pos.push(colors[x]);
    }
    let mut search = Search {
        p,
        colors: &colors,
        cell_of_pos,
        best: None,
        best_order: Vec::new(),
        code: Vec::with_capacity(n * n / 2),
        order: Vec::with_capacity(n),
    };
    search.run(0);
    let mut form = vec![n as u8];
    form.extend(search.best.unwrap_or_default());
    Ok((form, search.best_order))
}

/// The poset (in canonical labelling) encoded by a canonical form.
pub fn from_canonical_form(form: &[u8]) -> Result<Poset> {
    let bad = |m: &str| Error::Parse { line: 0, message: m.to_string() };
    let (&n, rest) = form.split_first().ok_or_else(|| bad("empty canonical form"))?;
    let n = n as usize;
    if rest.len() != n * n.saturating_sub(1) / 2 {
        return Err(bad("canonical form has the wrong length"));
    }
    let mut pairs = Vec::new();
    let mut it = rest.iter();
    for k in 0..n {
        for j in 0..k {
            match it.next() {
                Some(0) => {}
                Some(1) => pairs.push((j, k)),
                Some(2) => pairs.push((k, j)),
                _ => return Err(bad("invalid symbol in canonical form")),
            }
        }
    }
    Poset::from_cover_relations(n, &pairs)
}

/// Isomorphism-invariant colour per element; colours are dense ranks of
/// sorted signatures, so equal posets up to relabelling get equal colourings.
fn refine(p: &Poset) -> Vec<u32> {
    let n = p.n();
    let initial: Vec<Vec<u32>> = (0..n)
        .map(|x| {
            vec![
                p.below(x).len() as u32,
                p.above(x).len() as u32,
                p.lower_covers(x).len() as u32,
                p.upper_covers(x).len() as u32,
            ]
        })
        .collect();
    let mut colors = rank(&initial);
    loop {
        let classes = distinct(&colors);
        let sigs: Vec<Vec<u32>> = (0..n)
            .map(|x| {
                let mut down: Vec<u32> = p.below(x).iter().map(|y| colors[y]).collect();
                let mut up: Vec<u32> = p.above(x).iter().map(|y| colors[y]).collect();
                let mut cdown: Vec<u32> = p.lower_covers(x).iter().map(|y| colors[y]).collect();
                let mut cup: Vec<u32> = p.upper_covers(x).iter().map(|y| colors[y]).collect();
                down.sort_unstable();
                up.sort_unstable();
                cdown.sort_unstable();
                cup.sort_unstable();
                let mut s = vec![colors[x], u32::MAX];
                for part in [down, up, cdown, cup] {
                    s.extend(part);
                    s.push(u32::MAX);
                }
                s
            })
            .collect();
        let next = rank(&sigs);
        if distinct(&next) == classes {
            return next;
        }
        colors = next;
    }
}

fn rank(sigs: &[Vec<u32>]) -> Vec<u32> {
    let mut uniq: Vec<&Vec<u32>> = sigs.iter().collect();
    uniq.sort();
    uniq.dedup();
    sigs.iter().map(|s| uniq.binary_search(&s).unwrap() as u32).collect()
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

struct Search<'a> {
    p: &'a Poset,
    colors: &'a [u32],
    cell_of_pos: Vec<u32>,
    best: Option<Vec<u8>>,
    best_order: Vec<usize>,
    code: Vec<u8>,
    order: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, placed: u64) {
        let k = self.order.len();
        let n = self.p.n();
        if k == n {
            if self.best.as_ref().is_none_or(|b| self.code < *b) {
                self.best = Some(self.code.clone());
                self.best_order = self.order.clone();
            }
            return;
        }
        let cell = self.cell_of_pos[k];
        let mut tried: Vec<usize> = Vec::new();
        for x in 0..n {
            if placed >> x & 1 == 1 || self.colors[x] != cell {
                continue;
            }
            if tried.iter().any(|&t| self.twins(t, x)) {
                continue;
            }
            tried.push(x);
            let start = self.code.len();
            for &y in &self.order {
                let sym = if self.p.lt(y, x) {
                    1
                } else if self.p.lt(x, y) {
                    2
                } else {
                    0
                };
                self.code.push(sym);
            }
            // Prefix compare against the incumbent; it may have changed in
            // an earlier sibling's subtree.
            let dominated = self
                .best
                .as_ref()
                .is_some_and(|b| self.code[..] > b[..self.code.len()]);
            if !dominated {
                self.order.push(x);
                self.run(placed | 1 << x);
                self.order.pop();
            }
            self.code.truncate(start);
        }
    }

    /// `a` and `b` can be swapped by an automorphism fixing everything else.
    fn twins(&self, a: usize, b: usize) -> bool {
        let p = self.p;
        p.below(a) == p.below(b) && p.above(a) == p.above(b)
    }
}
