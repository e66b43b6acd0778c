//! Balance parameters: δ and its variants, gap, τ, diffuseness, fractional
//! matchings of antichains, and trend tables over families.

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{exact_stats_with, order_counts, Caps, ExtensionStats};
use crate::error::{Error, Result};
use crate::families;
use crate::lattice::IdealLattice;
use crate::poset::Poset;
use crate::rational::{self, from_int, ser, Rational};
use crate::set::ElementSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BalanceConfig {
    /// Largest |X| examined for τ.
    pub tau_cap: usize,
    /// τ is only computed for n up to this size.
    pub tau_max_n: usize,
    /// Ordering-probability evaluations allowed for δ_k.
    pub delta_k_budget: u64,
}

impl Default for BalanceConfig {
    fn default() -> Self {
        BalanceConfig { tau_cap: 5, tau_max_n: 10, delta_k_budget: 50_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tau {
    #[serde(serialize_with = "ser::f64_sig")]
    pub value: f64,
    pub witness: Vec<usize>,
    /// Subsets larger than the cap were skipped.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BalanceReport {
    #[serde(serialize_with = "ser::rational")]
    pub delta: Rational,
    pub delta_pair: Option<(usize, usize)>,
    #[serde(serialize_with = "ser::rationals")]
    pub delta_x: Vec<Rational>,
    #[serde(rename = "deltamatrix", serialize_with = "ser::rational_matrix")]
    pub delta_matrix: Vec<Vec<Rational>>,
    #[serde(serialize_with = "ser::rational")]
    pub gap: Rational,
    pub tau: Option<Tau>,
    pub width: usize,
    pub height: usize,
    #[serde(rename = "piP")]
    pub pi_p: usize,
    /// Largest variance of a position.
    #[serde(rename = "sigma2P", serialize_with = "ser::rational")]
    pub sigma2_p: Rational,
    #[serde(rename = "sigmaP", serialize_with = "ser::f64_sig")]
    pub sigma_p: f64,
    #[serde(rename = "winP", serialize_with = "ser::opt_rational")]
    pub win_p: Option<Rational>,
}

/// `δ_xy = min(Pr(x ≺ y), Pr(y ≺ x))`.
pub fn delta_matrix(stats: &ExtensionStats) -> Vec<Vec<Rational>> {
    let n = stats.n;
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| if x == y { Rational::zero() } else { stats.prec[x][y].clone().min(stats.prec[y][x].clone()) })
                .collect()
        })
        .collect()
}

/// δ(P) with its lexicographically smallest witness pair (`None` for n < 2).
pub fn delta(m: &[Vec<Rational>]) -> (Rational, Option<(usize, usize)>) {
    let mut best = (Rational::zero(), None);
    for x in 0..m.len() {
        for y in x + 1..m.len() {
            if best.1.is_none() || m[x][y] > best.0 {
                best = (m[x][y].clone(), Some((x, y)));
            }
        }
    }
    best
}

/// Largest spacing of the sorted average heights, with boundary terms
/// `h(x_1)` and `n + 1 - h(x_n)`.
pub fn gap(h: &[Rational]) -> Rational {
    let mut s = h.to_vec();
    s.sort();
    let mut prev = Rational::zero();
    let mut best = Rational::zero();
    for v in &s {
        best = best.max(v - &prev);
        prev = v.clone();
    }
    best.max(from_int(s.len() as i64 + 1) - prev)
}

/// Gap of a chain `C = (y_1 < ... < y_m)`.
pub fn gap_chain(p: &Poset, h: &[Rational], c: &[usize]) -> Result<Rational> {
    for &y in c {
        p.check_index(y)?;
    }
    for w in c.windows(2) {
        if !p.lt(w[0], w[1]) {
            return Err(Error::NotAChain { low: w[0], high: w[1] });
        }
    }
    let mut prev = Rational::zero();
    let mut best = Rational::zero();
    for &y in c {
        best = best.max(&h[y] - &prev);
        prev = h[y].clone();
    }
    Ok(best.max(from_int(p.n() as i64 + 1) - prev))
}

/// Binary entropy of the relative order of `xs`.
pub fn order_entropy(p: &Poset, lattice: &IdealLattice, xs: &[usize]) -> f64 {
    let e = lattice.count().to_f64().unwrap_or(f64::INFINITY);
    order_counts(p, lattice, xs)
        .values()
        .filter(|c| !c.is_zero())
        .map(|c| {
            let q = c.to_f64().unwrap_or(0.0) / e;
            -q * q.log2()
        })
        .sum()
}

/// `τ(P)` over subsets of size at most `cap`; `None` when `n > max_n`.
pub fn tau(p: &Poset, lattice: &IdealLattice, cfg: &BalanceConfig) -> Option<Tau> {
    let n = p.n();
    if n > cfg.tau_max_n {
        return None;
    }
    let top = n.min(cfg.tau_cap);
    let subsets: Vec<Vec<usize>> = (2..=top).flat_map(|k| (0..n).combinations(k)).collect();
    let values: Vec<f64> = subsets.par_iter().map(|xs| order_entropy(p, lattice, xs) / xs.len() as f64).collect();
    let mut best = Tau { value: 0.0, witness: Vec::new(), truncated: n > cfg.tau_cap };
    for (xs, v) in subsets.into_iter().zip(values) {
        if v > best.value + 1e-12 {
            best.value = v;
            best.witness = xs;
        }
    }
    Some(best)
}

pub fn balance_report(p: &Poset, caps: Caps, cfg: &BalanceConfig) -> Result<BalanceReport> {
    let lattice = IdealLattice::build(p, caps.ideal_cap)?;
    let stats = exact_stats_with(p, &lattice, caps.enum_cap);
    balance_report_with(p, &lattice, &stats, cfg)
}

pub fn balance_report_with(
    p: &Poset,
    lattice: &IdealLattice,
    stats: &ExtensionStats,
    cfg: &BalanceConfig,
) -> Result<BalanceReport> {
    let n = p.n();
    let m = delta_matrix(stats);
    let (d, pair) = delta(&m);
    let delta_x = m.iter().map(|row| row.iter().cloned().max().unwrap_or_else(Rational::zero)).collect();
    let pi_p = (0..n).map(|x| p.incomparable(x).len()).max().unwrap_or(0);
    let sigma2_p = stats.sigma2.iter().cloned().max().unwrap_or_else(Rational::zero);
    let win_p = stats.win.as_ref().and_then(|w| w.iter().cloned().max());
    Ok(BalanceReport {
        delta: d,
        delta_pair: pair,
        delta_x,
        delta_matrix: m,
        gap: gap(&stats.h),
        tau: tau(p, lattice, cfg),
        width: p.width(),
        height: p.height(),
        pi_p,
        sigma_p: rational::round_sig(rational::to_f64(&sigma2_p).sqrt()),
        sigma2_p,
        win_p,
    })
}

/// `δ_k(X)`: max over k-subsets Y of X of the least probability of any
/// relative order of Y, with the lexicographically first maximizing Y.
pub fn delta_k(p: &Poset, x: ElementSet, k: usize, budget: u64, ideal_cap: usize) -> Result<(Rational, Vec<usize>)> {
    let lattice = IdealLattice::build(p, ideal_cap)?;
    delta_k_with(p, &lattice, x, k, budget)
}

pub fn delta_k_with(
    p: &Poset,
    lattice: &IdealLattice,
    x: ElementSet,
    k: usize,
    budget: u64,
) -> Result<(Rational, Vec<usize>)> {
    for y in x {
        p.check_index(y)?;
    }
    if k == 0 || k > x.len() || k > 15 {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={} (and at most 15)", x.len())));
    }
    let needed = binomial(x.len(), k) * (1..=k as u128).product::<u128>();
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let orders: u128 = (1..=k as u128).product();
    let e = lattice.count();
    let ys: Vec<Vec<usize>> = x.iter().combinations(k).collect();
    let mins: Vec<BigUint> = ys
        .par_iter()
        .map(|y| {
            let counts = order_counts(p, lattice, y);
            if (counts.len() as u128) < orders {
                BigUint::zero()
            } else {
                counts.into_values().min().unwrap_or_default()
            }
        })
        .collect();
    let mut best: Option<(BigUint, usize)> = None;
    for (i, m) in mins.into_iter().enumerate() {
        if best.as_ref().is_none_or(|(b, _)| m > *b) {
            best = Some((m, i));
        }
    }
    let (m, i) = best.expect("at least one subset");
    Ok((rational::from_counts(&m, e), ys[i].clone()))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diffuseness {
    /// `Pr(x ≺ y_1)`, `Pr(y_i ≺ x ≺ y_{i+1})`, ..., `Pr(y_m ≺ x)`.
    #[serde(serialize_with = "ser::rationals")]
    pub cells: Vec<Rational>,
    #[serde(serialize_with = "ser::rational")]
    pub max_cell: Rational,
    pub diffuse: bool,
}

/// Whether `x` is ε-diffuse with respect to the chain `c`.
pub fn is_diffuse(p: &Poset, lattice: &IdealLattice, x: usize, c: &[usize], eps: &Rational) -> Result<Diffuseness> {
    p.check_index(x)?;
    for &y in c {
        p.check_index(y)?;
    }
    if c.is_empty() || c.contains(&x) {
        return Err(Error::InvalidArgument("x must lie outside a non-empty chain".into()));
    }
    for w in c.windows(2) {
        if !p.lt(w[0], w[1]) {
            return Err(Error::NotAChain { low: w[0], high: w[1] });
        }
    }
    let mut ys = c.to_vec();
    ys.push(x);
    let mut cells = vec![BigUint::zero(); c.len() + 1];
    for (order, count) in order_counts(p, lattice, &ys) {
        let pos = order.iter().position(|&z| z == x).expect("x is tracked");
        cells[pos] += count;
    }
    let e = lattice.count();
    let cells: Vec<Rational> = cells.iter().map(|cnt| rational::from_counts(cnt, e)).collect();
    let max_cell = cells.iter().cloned().max().expect("non-empty");
    Ok(Diffuseness { diffuse: max_cell < *eps, cells, max_cell })
}

/// Nonnegative antichain weights with per-element total at most 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FractionalMatching {
    pub weights: Vec<(ElementSet, Rational)>,
}

impl FractionalMatching {
    /// Weight 1 on each height level.
    pub fn levels(p: &Poset) -> Self {
        FractionalMatching { weights: p.level_antichains().into_iter().map(|a| (a, Rational::one())).collect() }
    }

    pub fn validate(&self, p: &Poset) -> Result<()> {
        let mut load = vec![Rational::zero(); p.n()];
        for (a, w) in &self.weights {
            let first = a.iter().next().unwrap_or(0);
            for y in *a {
                p.check_index(y)?;
            }
            if *w < Rational::zero() || *w > Rational::one() {
                return Err(Error::InvalidMatching {
                    element: first,
                    reason: format!("weight {} outside [0, 1]", rational::format(w)),
                });
            }
            if !p.is_antichain(*a) {
                return Err(Error::InvalidMatching { element: first, reason: "support set is not an antichain".into() });
            }
            for y in *a {
                load[y] += w;
                if load[y] > Rational::one() {
                    return Err(Error::InvalidMatching {
                        element: y,
                        reason: format!("total weight {} exceeds 1", rational::format(&load[y])),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingEvaluation {
    /// `Σ λ_A |A|²`.
    #[serde(serialize_with = "ser::rational")]
    pub value: Rational,
    /// `Σ_x win(x) >= Σ_A λ_A Σ_{x∈A} win(x) >= Σ λ_A |A|²`, when win is known.
    pub win_chain: Option<WinChain>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinChain {
    #[serde(serialize_with = "ser::rational")]
    pub total_win: Rational,
    #[serde(serialize_with = "ser::rational")]
    pub weighted_win: Rational,
    pub holds: bool,
}

pub fn evaluate_fractional_matching(
    p: &Poset,
    lambda: &FractionalMatching,
    win: Option<&[Rational]>,
) -> Result<MatchingEvaluation> {
    lambda.validate(p)?;
    let value: Rational = lambda.weights.iter().map(|(a, w)| w * from_int(a.len() as i64).pow(2)).sum();
    let win_chain = win.map(|win| {
        let total_win: Rational = win.iter().sum();
        let weighted_win: Rational =
            lambda.weights.iter().map(|(a, w)| w * a.iter().map(|x| &win[x]).sum::<Rational>()).sum();
        let holds = total_win >= weighted_win && weighted_win >= value;
        WinChain { total_win, weighted_win, holds }
    });
    Ok(MatchingEvaluation { value, win_chain })
}

pub const TREND_HEADER: &str = "family,n,delta,delta3,winP,gap,width";

/// One trend row; `None` cells were beyond the caps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub family: String,
    pub param: u64,
    pub n: Option<usize>,
    #[serde(serialize_with = "ser::opt_rational")]
    pub delta: Option<Rational>,
    #[serde(serialize_with = "ser::opt_rational")]
    pub delta3: Option<Rational>,
    #[serde(rename = "winP", serialize_with = "ser::opt_rational")]
    pub win_p: Option<Rational>,
    #[serde(serialize_with = "ser::opt_rational")]
    pub gap: Option<Rational>,
    pub width: Option<usize>,
}

impl TrendRow {
    pub fn to_csv(&self) -> String {
        let q = |v: &Option<Rational>| v.as_ref().map(rational::format).unwrap_or_default();
        let u = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.family,
            u(self.n),
            q(&self.delta),
            q(&self.delta3),
            q(&self.win_p),
            q(&self.gap),
            u(self.width)
        )
    }
}

/// Per-parameter rows for a named family (see [`families::indexed`]).
/// Instances beyond the caps leave empty cells; asymptotics are monitored, not asserted.
pub fn trend_report(family: &str, params: &[u64], caps: Caps, cfg: &BalanceConfig) -> Result<Vec<TrendRow>> {
    let mut rows = Vec::with_capacity(params.len());
    for &param in params {
        let mut row = TrendRow {
            family: family.to_string(),
            param,
            n: None,
            delta: None,
            delta3: None,
            win_p: None,
            gap: None,
            width: None,
        };
        let p = match families::indexed(family, param) {
            Ok(p) => p,
            Err(e) if e.is_cap() => {
                rows.push(row);
                continue;
            }
            Err(e) => return Err(e),
        };
        row.n = Some(p.n());
        row.width = Some(p.width());
        if let Ok(lattice) = IdealLattice::build(&p, caps.ideal_cap) {
            let stats = exact_stats_with(&p, &lattice, caps.enum_cap);
            row.delta = Some(delta(&delta_matrix(&stats)).0);
            row.gap = Some(gap(&stats.h));
            row.win_p = stats.win.as_ref().and_then(|w| w.iter().cloned().max());
            if p.n() >= 3 {
                row.delta3 = delta_k_with(&p, &lattice, p.ground(), 3, cfg.delta_k_budget).ok().map(|(d, _)| d);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn trend_csv(rows: &[TrendRow]) -> String {
    let mut s = String::from(TREND_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}
