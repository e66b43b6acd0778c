//! Named constructions, random posets and the isomorphism-reduced catalog.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::balance::delta_matrix;
use crate::canon::{canonical_form, from_canonical_form, CanonicalForm};
use crate::engine::{exact_stats_with, Caps};
use crate::error::{Error, Result};
use crate::lattice::IdealLattice;
use crate::poset::Poset;
use crate::rational::{self, from_int, Rational};
use crate::sampler::{self, Estimate};
use crate::set::{ElementSet, MAX_ELEMENTS};

/// Largest n accepted by [`catalog`].
pub const CATALOG_MAX_N: usize = 8;

pub fn chain(k: usize) -> Result<Poset> {
    check_size(k)?;
    Ok(Poset::chain(k))
}

pub fn antichain(k: usize) -> Result<Poset> {
    check_size(k)?;
    Ok(Poset::antichain(k))
}

fn check_size(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("size must be at least 1".into()));
    }
    if k > MAX_ELEMENTS {
        return Err(Error::SizeCapExceeded { what: "element count", size: k, cap: MAX_ELEMENTS });
    }
    Ok(())
}

/// Unrelated chains of lengths 2, 4, ..., 2^t.
pub fn komlos_chains(t: usize) -> Result<Poset> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    let n = (1usize << t.min(7)) * 2 - 2;
    if t > 7 || n > MAX_ELEMENTS {
        return Err(Error::SizeCapExceeded { what: "element count", size: n.max(MAX_ELEMENTS + 1), cap: MAX_ELEMENTS });
    }
    (2..=t).try_fold(Poset::chain(2), |p, i| p.parallel_sum(&Poset::chain(1 << i)))
}

/// Chain `y_1 < ... < y_m` (`m = 2^t`, labels `0..m`) plus `x_1..x_t`
/// (labels `m..m+t`) with the single cover `x_i < y_{2^i}`.
pub fn bit_example(t: usize) -> Result<Poset> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    if t > 6 || (1usize << t) + t > MAX_ELEMENTS {
        return Err(Error::SizeCapExceeded {
            what: "element count",
            size: (1usize << t.min(7)) + t,
            cap: MAX_ELEMENTS,
        });
    }
    let m = 1usize << t;
    let mut rel: Vec<(usize, usize)> = (1..m).map(|i| (i - 1, i)).collect();
    rel.extend((1..=t).map(|i| (m + i - 1, (1 << i) - 1)));
    Poset::from_cover_relations(m + t, &rel)
}

/// Whether `δ_xy <= eps` on all pairs of an antichain was decided exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Goodness {
    Verified {
        good: bool,
        #[serde(serialize_with = "rational::ser::rational")]
        max_delta: Rational,
    },
    /// Beyond the exact caps; a Markov-chain estimate of the largest δ_xy on the antichain is attached.
    Unverifiable {
        reason: String,
        #[serde(serialize_with = "rational::ser::f64_sig")]
        sampled_max_delta: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example111 {
    #[serde(skip)]
    pub poset: Poset,
    pub antichain: ElementSet,
    /// Goodness of the input pair and of each level produced.
    pub goodness: Vec<Goodness>,
}

/// Largest `δ_xy` over distinct pairs of `set`, exactly when the lattice fits.
pub fn goodness(p: &Poset, set: ElementSet, eps: &Rational, caps: Caps, seed: u64) -> Goodness {
    match IdealLattice::build(p, caps.ideal_cap) {
        Ok(lattice) => {
            let stats = exact_stats_with(p, &lattice, 0);
            let m = delta_matrix(&stats);
            let xs = set.to_vec();
            let mut max_delta = Rational::zero();
            for (i, &x) in xs.iter().enumerate() {
                for &y in &xs[i + 1..] {
                    max_delta = max_delta.max(m[x][y].clone());
                }
            }
            Goodness::Verified { good: max_delta <= *eps, max_delta }
        }
        Err(e) => Goodness::Unverifiable { reason: e.to_string(), sampled_max_delta: sampled_max_delta(p, set, seed) },
    }
}

fn sampled_max_delta(p: &Poset, set: ElementSet, seed: u64) -> f64 {
    const SAMPLES: usize = 2000;
    let n = p.n();
    let steps = (4 * n * n) as u64 * ((n.max(2) as f64).ln().ceil() as u64);
    let mut rng = sampler::rng(seed, 1);
    let xs = set.to_vec();
    let mut before = vec![0u32; n * n];
    for _ in 0..SAMPLES {
        let seq = sampler::sample_extension_mcmc(p, steps, &mut rng);
        let mut pos = vec![0usize; n];
        for (i, &y) in seq.iter().enumerate() {
            pos[y] = i;
        }
        for &x in &xs {
            for &y in &xs {
                if pos[x] < pos[y] {
                    before[x * n + y] += 1;
                }
            }
        }
    }
    let mut best = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        for &y in &xs[i + 1..] {
            let a = before[x * n + y].min(before[y * n + x]) as f64 / SAMPLES as f64;
            best = best.max(a);
        }
    }
    rational::round_sig(best)
}

/// `levels` rounds of `(Q, J) = ([P' ⊕ A'] + [A'' ⊕ P''], I' ∪ I'')` with
/// `|A'| = |A''| = ceil((1 + eps) |P|)`.
pub fn example_11_1(
    eps: &Rational,
    levels: usize,
    base: &Poset,
    base_antichain: ElementSet,
    caps: Caps,
) -> Result<Example111> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    if !base_antichain.is_subset(base.ground()) || !base.is_antichain(base_antichain) {
        return Err(Error::InvalidArgument("base set must be an antichain of the base poset".into()));
    }
    let mut p = base.clone();
    let mut set = base_antichain;
    let mut report = vec![goodness(&p, set, eps, caps, 0)];
    for level in 0..levels {
        let m = p.n();
        let a = (eps + Rational::one()) * from_int(m as i64);
        let a = a.ceil().to_integer().to_usize().unwrap_or(usize::MAX);
        let q_n = 2 * (m + a);
        if q_n > MAX_ELEMENTS {
            return Err(Error::SizeCapExceeded { what: "element count", size: q_n, cap: MAX_ELEMENTS });
        }
        let left = p.series_sum(&Poset::antichain(a))?;
        let right = Poset::antichain(a).series_sum(&p)?;
        let q = left.parallel_sum(&right)?;
        let shift = m + a + a;
        set = set.union(ElementSet::from_elements(set.iter().map(|x| x + shift)));
        p = q;
        report.push(goodness(&p, set, eps, caps, level as u64 + 1));
    }
    Ok(Example111 { poset: p, antichain: set, goodness: report })
}

/// `S = C_k ⊕ (C_r + C_a) ⊕ C_l`; returns S and x, the bottom of `C_r`.
pub fn example_11_2(r: usize, a: usize, k: usize, l: usize) -> Result<(Poset, usize)> {
    if r == 0 || a == 0 || k == 0 || l == 0 {
        return Err(Error::InvalidArgument("r, a, k, l must all be at least 1".into()));
    }
    let n = k + r + a + l;
    if n > MAX_ELEMENTS {
        return Err(Error::SizeCapExceeded { what: "element count", size: n, cap: MAX_ELEMENTS });
    }
    let middle = Poset::chain(r).parallel_sum(&Poset::chain(a))?;
    let s = Poset::chain(k).series_sum(&middle)?.series_sum(&Poset::chain(l))?;
    Ok((s, k))
}

/// `h_S(x) = k + (r + a + 1)/(r + 1)` for [`example_11_2`].
pub fn h_formula_11_2(r: u64, a: u64, k: u64) -> Rational {
    Rational::from_integer(BigInt::from(k)) + Rational::new(BigInt::from(r + a + 1), BigInt::from(r + 1))
}

/// `H_S(x) = h_S(x)/(m+1)` with `m = k + r + a + l`.
pub fn balance_11_2(r: u64, a: u64, k: u64, l: u64) -> Rational {
    h_formula_11_2(r, a, k) / Rational::from_integer(BigInt::from(k + r + a + l + 1))
}

/// `(k, l)` with `1 <= k, l < 3a` minimizing `|H_S(x) - 1/2|`; ties go to the
/// smallest k, then the smallest l.
pub fn solve_11_2(r: u64, a: u64) -> Result<(u64, u64)> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    if a == 0 {
        return Err(Error::NoFeasibleKL { r, a });
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let top = 3 * a - 1;
    let c = Rational::new(BigInt::from(r + a + 1), BigInt::from(r + 1));
    let mut best: Option<(Rational, u64, u64)> = None;
    for k in 1..=top {
        // H = 1/2 exactly at l* = k + 2c - r - a - 1; |H - 1/2| is monotone on either side.
        let l_star = from_int(k as i64) + &c * from_int(2) - from_int((r + a + 1) as i64);
        let lo = l_star.floor().to_integer();
        let hi = l_star.ceil().to_integer();
        let mut cands: BTreeSet<u64> = BTreeSet::new();
        for v in [lo, hi] {
            let v = v.clamp(BigInt::one(), BigInt::from(top));
            cands.insert(v.to_u64().expect("bounded"));
        }
        for l in cands {
            let dev = (balance_11_2(r, a, k, l) - &half).abs();
            if best.as_ref().is_none_or(|(b, _, _)| dev < *b) {
                best = Some((dev, k, l));
            }
        }
    }
    let (_, k, l) = best.ok_or(Error::NoFeasibleKL { r, a })?;
    Ok((k, l))
}

/// Sampled `Pr(F_S(x) > 1/2 - δ)` for [`example_11_2`], default `δ = (a r)^{-1/2}`.
#[allow(clippy::too_many_arguments)]
pub fn example_11_2_tail(
    r: usize,
    a: usize,
    k: usize,
    l: usize,
    delta: Option<f64>,
    samples: u64,
    seed: u64,
    ideal_cap: usize,
) -> Result<Estimate> {
    let (s, x) = example_11_2(r, a, k, l)?;
    let d = delta.unwrap_or(1.0 / ((a * r) as f64).sqrt());
    sampler::estimate_point_event(&s, samples, seed, ideal_cap, |pt| pt.coords[x] > 0.5 - d)
}

/// Random DAG on a uniformly shuffled vertex order with independent edges,
/// transitively closed. Deterministic per seed.
pub fn random_poset(n: usize, p: f64, seed: u64) -> Result<Poset> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
    }
    if n > MAX_ELEMENTS {
        return Err(Error::SizeCapExceeded { what: "element count", size: n, cap: MAX_ELEMENTS });
    }
    let mut rng = sampler::rng(seed, 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut rel = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                rel.push((order[i], order[j]));
            }
        }
    }
    Poset::from_cover_relations(n, &rel)
}

/// Catalogs for sizes `0..=n`, one poset per isomorphism class, each in
/// canonical labelling and sorted by canonical form.
pub fn catalog_levels(n: usize) -> Result<Vec<Vec<Poset>>> {
    if n > CATALOG_MAX_N {
        return Err(Error::SizeCapExceeded { what: "catalog size", size: n, cap: CATALOG_MAX_N });
    }
    let mut levels = vec![vec![Poset::antichain(0)]];
    for m in 1..=n {
        let mut forms: BTreeSet<CanonicalForm> = BTreeSet::new();
        for p in &levels[m - 1] {
            // Every poset on m elements is some (m-1)-poset plus a maximal
            // element whose down-set is an ideal.
            let lattice = IdealLattice::build(p, usize::MAX)?;
            let base = p.relations();
            for &ideal in lattice.ideals() {
                let mut rel = base.clone();
                rel.extend(p.max_of(ideal).iter().map(|y| (y, m - 1)));
                forms.insert(canonical_form(&Poset::from_cover_relations(m, &rel)?)?);
            }
        }
        let level = forms.iter().map(|f| from_canonical_form(f)).collect::<Result<Vec<_>>>()?;
        levels.push(level);
    }
    Ok(levels)
}

/// One poset per isomorphism class on `n` elements, in canonical-form order.
pub fn catalog(n: usize) -> Result<Vec<Poset>> {
    Ok(catalog_levels(n)?.pop().expect("level n"))
}

/// All classes with `1 <= size <= n`, by size then canonical form.
pub fn catalog_upto(n: usize) -> Result<Vec<Poset>> {
    Ok(catalog_levels(n)?.into_iter().skip(1).flatten().collect())
}

/// A generator name with parameters, as accepted by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FamilySpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

/// A generated poset with distinguished elements (the antichain of
/// example-11-1, the element x of example-11-2) and remarks.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyInstance {
    pub poset: Poset,
    pub marked: Vec<usize>,
    pub notes: Vec<String>,
}

pub const FAMILY_NAMES: &[&str] = &["chain", "antichain", "komlos", "bit", "example-11-1", "example-11-2", "random"];

impl FamilySpec {
    pub fn new(name: &str) -> Self {
        FamilySpec { name: name.to_string(), ..Default::default() }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.params
            .get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::InvalidArgument(format!("invalid value `{v}` for `{key}`"))))
            .transpose()
    }

    fn need<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| Error::InvalidArgument(format!("family `{}` needs --{key}", self.name)))
    }

    fn rational(&self, key: &str) -> Result<Option<Rational>> {
        self.params
            .get(key)
            .map(|v| rational::parse(v).ok_or_else(|| Error::InvalidArgument(format!("invalid rational `{v}` for `{key}`"))))
            .transpose()
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidArgument(format!("family `{}` has no parameter `{k}`", self.name))),
            None => Ok(()),
        }
    }

    pub fn build(&self, caps: Caps) -> Result<FamilyInstance> {
        let plain = |poset| Ok(FamilyInstance { poset, marked: Vec::new(), notes: Vec::new() });
        match self.name.as_str() {
            "chain" | "antichain" => {
                self.check_keys(&["k", "n"])?;
                let k = match self.get::<usize>("k")? {
                    Some(k) => k,
                    None => self.need("n")?,
                };
                plain(if self.name == "chain" { chain(k)? } else { antichain(k)? })
            }
            "komlos" => {
                self.check_keys(&["t"])?;
                plain(komlos_chains(self.need("t")?)?)
            }
            "bit" => {
                self.check_keys(&["t"])?;
                plain(bit_example(self.need("t")?)?)
            }
            "example-11-1" => {
                self.check_keys(&["eps", "levels"])?;
                let eps = self.rational("eps")?.unwrap_or_else(|| Rational::new(BigInt::one(), BigInt::from(2)));
                let levels = self.get("levels")?.unwrap_or(1);
                let ex = example_11_1(&eps, levels, &Poset::chain(1), ElementSet::singleton(0), caps)?;
                let notes = ex
                    .goodness
                    .iter()
                    .enumerate()
                    .map(|(i, g)| match g {
                        Goodness::Verified { good, max_delta } => format!(
                            "level {i}: max delta on antichain {} ({})",
                            rational::format(max_delta),
                            if *good { "good" } else { "not good" }
                        ),
                        Goodness::Unverifiable { reason, sampled_max_delta } => {
                            format!("level {i}: unverifiable ({reason}); sampled max delta {sampled_max_delta}")
                        }
                    })
                    .collect();
                Ok(FamilyInstance { poset: ex.poset, marked: ex.antichain.to_vec(), notes })
            }
            "example-11-2" => {
                self.check_keys(&["r", "a", "k", "l"])?;
                let r: u64 = self.need("r")?;
                let a: u64 = self.need("a")?;
                let (k, l) = match (self.get::<u64>("k")?, self.get::<u64>("l")?) {
                    (Some(k), Some(l)) => (k, l),
                    (None, None) => solve_11_2(r, a)?,
                    _ => return Err(Error::InvalidArgument("give both k and l, or neither".into())),
                };
                let (poset, x) = example_11_2(r as usize, a as usize, k as usize, l as usize)?;
                let h = balance_11_2(r, a, k, l);
                Ok(FamilyInstance {
                    poset,
                    marked: vec![x],
                    notes: vec![format!("r={r} a={a} k={k} l={l} x={x} H(x)={}", rational::format(&h))],
                })
            }
            "random" => {
                self.check_keys(&["n", "p"])?;
                let p: f64 = self.need("p")?;
                plain(random_poset(self.need("n")?, p, self.seed.unwrap_or(0))?)
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown family `{other}` (expected one of {})",
                FAMILY_NAMES.join(", ")
            ))),
        }
    }
}

/// Single-parameter families for trend tables: `chain`/`antichain` by size,
/// `komlos`/`bit` by t.
pub fn indexed(name: &str, param: u64) -> Result<Poset> {
    let k = usize::try_from(param).map_err(|_| Error::InvalidArgument(format!("parameter {param} too large")))?;
    match name {
        "chain" => chain(k),
        "antichain" => antichain(k),
        "komlos" => komlos_chains(k),
        "bit" => bit_example(k),
        other => Err(Error::InvalidArgument(format!(
            "family `{other}` has no single size parameter (expected chain, antichain, komlos or bit)"
        ))),
    }
}
