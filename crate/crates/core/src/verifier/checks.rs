use std::collections::VecDeque;

use itertools::Itertools;
use num_traits::{One, Zero};

use super::{Check, Context};
use crate::balance::{delta, delta_matrix, gap, order_entropy};
use crate::error::Result;
use crate::geometry;
use crate::lattice::count_extensions;
use crate::poset::Poset;
use crate::rational::{self, from_biguint, from_int, Rational};
use crate::report::{CheckReport, Extremal, Severity, Status, Tracker};
use crate::set::ElementSet;

pub(super) fn run(ctx: &Context, check: Check) -> Result<CheckReport> {
    match check {
        Check::Xyz => xyz(ctx),
        Check::Fishburn => fishburn(ctx),
        Check::Tsumwin => tsumwin(ctx),
        Check::Tehs => tehs(ctx),
        Check::Lsks => lsks(ctx),
        Check::LogConcavity => log_concavity(ctx),
        Check::GrunbaumPairs => grunbaum_pairs(ctx),
        Check::Efxy => efxy(ctx),
        Check::Cl1 => cl1(ctx),
        Check::WinH => geometry::winh(ctx.poset, ctx.geometry()?),
        Check::CornerBounds => geometry::corner_bounds(ctx.geometry()?),
        Check::WinVariance => geometry::win_variance(ctx.geometry()?, ctx.stats()?),
        Check::A1Full => a1(ctx, true),
        Check::OneThird => one_third(ctx),
        Check::ConjA1 => a1(ctx, false),
        Check::ConjWinVar => geometry::winvar_check(ctx.poset, ctx.geometry()?),
        Check::ConjIncreaseH => increase_h(ctx),
        Check::ConjGapW => gapw(ctx),
        Check::ConjGapTau => gaptau(ctx),
        Check::HDeleteX => hdeletex(ctx),
    }
}

fn tracker(ctx: &Context, check: Check) -> Tracker {
    Tracker::new(check.name(), check.severity(), ctx.poset.n())
}

fn antichains(p: &Poset) -> Result<Vec<ElementSet>> {
    Ok(p.antichains(p.n())?.filter(|a| !a.is_empty()).collect())
}

/// `Pr(x ≻ Y) >= ∏ Pr(x ≻ y)` for `|Y| <= xyz_max_y`; the left side counts
/// extensions of P with every `y < x` added.
fn xyz(ctx: &Context) -> Result<CheckReport> {
    let p = ctx.poset;
    let n = p.n();
    let stats = ctx.stats()?;
    let cap = ctx.config.caps.ideal_cap;
    let e = from_biguint(&stats.e);
    let base = p.relations();
    let mut t = tracker(ctx, Check::Xyz);
    for x in 0..n {
        let others: Vec<usize> = (0..n).filter(|&y| y != x).collect();
        for k in 1..=ctx.config.xyz_max_y.min(others.len()) {
            for ys in others.iter().copied().combinations(k) {
                let rhs: Rational = ys.iter().map(|&y| &stats.prec[y][x]).product();
                let lhs = if ys.iter().any(|&y| p.lt(x, y)) {
                    Rational::zero()
                } else {
                    let mut rel = base.clone();
                    rel.extend(ys.iter().map(|&y| (y, x)));
                    let q = Poset::from_cover_relations(n, &rel)?;
                    from_biguint(&count_extensions(&q, cap)?) / &e
                };
                let mut el = vec![x];
                el.extend(&ys);
                t.ge(&lhs, &rhs, &el, || format!("Pr({x} > {ys:?}) >= product"));
            }
        }
    }
    Ok(t.finish())
}

/// For filters K, L: `e(K∪L) e(K∩L) |K|! |L|! >= e(K) e(L) |K∪L|! |K∩L|!`.
fn fishburn(ctx: &Context) -> Result<CheckReport> {
    let p = ctx.poset;
    let n = p.n();
    if n > ctx.config.fishburn_max_n {
        return Ok(CheckReport::new(Check::Fishburn.name(), Check::Fishburn.severity(), Status::NotApplicable, n)
            .with_note(format!("skipped: n = {n} exceeds the filter-pair limit {}", ctx.config.fishburn_max_n)));
    }
    let lattice = ctx.lattice()?;
    let full = p.ground();
    let filters: Vec<ElementSet> = lattice.ideals().iter().map(|&i| full.difference(i)).collect();
    let e = |f: ElementSet| lattice.filter_count(f).expect("union and intersection of filters is a filter").clone();
    let fact = |s: ElementSet| rational::factorial(s.len());
    let mut t = tracker(ctx, Check::Fishburn);
    for (i, &k) in filters.iter().enumerate() {
        for &l in &filters[i..] {
            let u = k.union(l);
            let m = k.intersection(l);
            let lhs = e(u) * e(m) * fact(k) * fact(l);
            let rhs = e(k) * e(l) * fact(u) * fact(m);
            let el: Vec<usize> = k.iter().chain(l.iter()).collect();
            t.ge(&from_biguint(&lhs), &from_biguint(&rhs), &el, || format!("K = {k:?}, L = {l:?}"));
        }
    }
    Ok(t.finish())
}

/// `Σ_{x∈A} win(x) >= (n+1)|A|²/n` for every antichain A.
fn tsumwin(ctx: &Context) -> Result<CheckReport> {
    let p = ctx.poset;
    let n = p.n() as i64;
    let win = ctx.stats()?.win()?;
    let mut t = tracker(ctx, Check::Tsumwin);
    for a in antichains(p)? {
        let lhs: Rational = a.iter().map(|x| &win[x]).sum();
        let k = a.len() as i64;
        let rhs = Rational::new(((n + 1) * k * k).into(), n.into());
        t.ge(&lhs, &rhs, &a.to_vec(), || format!("A = {a:?}"));
    }
    Ok(t.finish())
}

/// `e(P) >= Σ_{x∈A} e(P - x)` for every antichain A.
fn tehs(ctx: &Context) -> Result<CheckReport> {
    let p = ctx.poset;
    let e = from_biguint(&ctx.stats()?.e);
    let del = ctx.deletion_counts()?;
    let mut t = tracker(ctx, Check::Tehs);
    for a in antichains(p)? {
        let rhs: Rational = a.iter().map(|x| from_biguint(&del[x])).sum();
        t.ge(&e, &rhs, &a.to_vec(), || format!("A = {a:?}"));
    }
    Ok(t.finish())
}

/// (a) `h(x) Pr(f(x)=1) <= 1`; (b) `(h(y)-h(x)) Pr(f(y)-f(x)=1) <= 1`.
/// Written multiplicatively so a zero probability makes the instance vacuous.
fn lsks(ctx: &Context) -> Result<CheckReport> {
    let stats = ctx.stats()?;
    let diff = stats.differences()?;
    let n = stats.n;
    let one = Rational::one();
    let mut t = tracker(ctx, Check::Lsks);
    for x in 0..n {
        let lhs = &stats.h[x] * &stats.rank_dist[x][0];
        t.ge(&one, &lhs, &[x], || format!("(a) h({x}) Pr(f({x})=1) <= 1"));
    }
    for x in 0..n {
        for y in 0..n {
            if x != y {
                let lhs = (&stats.h[y] - &stats.h[x]) * diff.probability(x, y, 1);
                t.ge(&one, &lhs, &[x, y], || format!("(b) (h({y})-h({x})) Pr(f({y})-f({x})=1) <= 1"));
            }
        }
    }
    Ok(t.finish())
}

fn log_concave(t: &mut Tracker, seq: &[Rational], el: &[usize], what: &str) {
    for k in 1..seq.len().saturating_sub(1) {
        let lhs = &seq[k] * &seq[k];
        let rhs = &seq[k - 1] * &seq[k + 1];
        t.ge(&lhs, &rhs, el, || format!("{what} at k = {}", k + 1));
    }
}

/// `Pr(f(x)=k)` and `Pr(f(y)-f(x)=k)` (k >= 1) are log-concave in k.
fn log_concavity(ctx: &Context) -> Result<CheckReport> {
    let stats = ctx.stats()?;
    let diff = stats.differences()?;
    let n = stats.n;
    let mut t = tracker(ctx, Check::LogConcavity);
    for x in 0..n {
        log_concave(&mut t, &stats.rank_dist[x], &[x], &format!("rank of {x}"));
    }
    for x in 0..n {
        for y in 0..n {
            if x != y {
                log_concave(&mut t, &diff.sequence(x, y), &[x, y], &format!("f({y})-f({x})"));
            }
        }
    }
    Ok(t.finish())
}

/// `h(x) <= h(y)` implies `Pr(f(x) < f(y)) >= 1/e` (rational under-approximation).
fn grunbaum_pairs(ctx: &Context) -> Result<CheckReport> {
    let stats = ctx.stats()?;
    let bound = rational::inv_e_lower();
    let mut t = tracker(ctx, Check::GrunbaumPairs);
    for x in 0..stats.n {
        for y in 0..stats.n {
            if x != y && stats.h[x] <= stats.h[y] {
                t.ge(&stats.prec[x][y], &bound, &[x, y], || format!("Pr({x} < {y}) >= 1/e"));
            }
        }
    }
    Ok(t.finish())
}

/// `E|f(x) - f(y)| >= win(x)/4` for all `y != x`.
fn efxy(ctx: &Context) -> Result<CheckReport> {
    let stats = ctx.stats()?;
    let win = stats.win()?;
    let eabs = stats.eabsdiff()?;
    let four = from_int(4);
    let mut t = tracker(ctx, Check::Efxy);
    for x in 0..stats.n {
        let rhs = &win[x] / &four;
        for y in 0..stats.n {
            if x != y {
                t.ge(&eabs[x][y], &rhs, &[x, y], || format!("E|f({x})-f({y})| >= win({x})/4"));
            }
        }
    }
    Ok(t.finish())
}

/// `win(x) α(x) >= 2 h(x)`.
fn cl1(ctx: &Context) -> Result<CheckReport> {
    let p = ctx.poset;
    let stats = ctx.stats()?;
    let win = stats.win()?;
    let two = from_int(2);
    let mut t = tracker(ctx, Check::Cl1);
    for x in 0..p.n() {
        let lhs = &win[x] * from_int(p.alpha(x)? as i64);
        t.ge(&lhs, &(&two * &stats.h[x]), &[x], || format!("win({x}) >= 2h({x})/alpha({x})"));
    }
    Ok(t.finish())
}

/// `max_{x∈A} h(x) >= |A| - |max A| + 1` for A = P only (`full`), or for every non-empty ideal.
fn a1(ctx: &Context, full: bool) -> Result<CheckReport> {
    let p = ctx.poset;
    let stats = ctx.stats()?;
    let check = if full { Check::A1Full } else { Check::ConjA1 };
    let mut t = tracker(ctx, check);
    let ideals: Vec<ElementSet> =
        if full { vec![p.ground()] } else { ctx.lattice()?.ideals().iter().copied().filter(|i| !i.is_empty()).collect() };
    for a in ideals.into_iter().filter(|a| !a.is_empty()) {
        let lhs = a.iter().map(|x| stats.h[x].clone()).max().expect("non-empty");
        let rhs = from_int((a.len() - p.max_of(a).len()) as i64 + 1);
        t.ge(&lhs, &rhs, &a.to_vec(), || format!("A = {a:?}"));
    }
    Ok(t.finish())
}

/// `δ(P) >= 1/3` for every non-chain.
fn one_third(ctx: &Context) -> Result<CheckReport> {
    let p = ctx.poset;
    let n = p.n();
    if p.is_chain() {
        return Ok(CheckReport::new(Check::OneThird.name(), Check::OneThird.severity(), Status::NotApplicable, n)
            .with_note("chain"));
    }
    let (d, pair) = delta(&delta_matrix(ctx.stats()?));
    let (x, y) = pair.expect("a non-chain has two elements");
    let mut t = tracker(ctx, Check::OneThird);
    t.ge(&d, &Rational::new(1.into(), 3.into()), &[x, y], || "delta(P) >= 1/3".into());
    let mut r = t.finish();
    r.values.insert("delta".into(), rational::format(&d));
    Ok(r)
}

/// Maps an element of P to its label in `P - x`.
fn shifted(y: usize, x: usize) -> usize {
    if y > x {
        y - 1
    } else {
        y
    }
}

/// (a) `Σ_{y≠x} max(h_P(y) - h_{P-x}(y), 0) <= n - 1`;
/// (b) `Σ_{y≠x} |H_P(y) - H_{P-x}(y)| <= (n-1)/(n+1)`, `H_{P-x} = h_{P-x}/n`.
/// The `|·|` strengthening of (a) is reported in `values`, not judged.
fn increase_h(ctx: &Context) -> Result<CheckReport> {
    let stats = ctx.stats()?;
    let del = ctx.deletions()?;
    let n = stats.n;
    let ni = n as i64;
    let mut t = tracker(ctx, Check::ConjIncreaseH);
    let bound_a = from_int(ni - 1);
    let bound_b = Rational::new((ni - 1).into(), (ni + 1).into());
    let mut abs_worst: Option<(Rational, usize)> = None;
    for x in 0..n {
        let mut sum_a = Rational::zero();
        let mut sum_abs = Rational::zero();
        let mut sum_b = Rational::zero();
        for y in (0..n).filter(|&y| y != x) {
            let diff = &stats.h[y] - &del[x].h[shifted(y, x)];
            if diff > Rational::zero() {
                sum_a += &diff;
            }
            sum_abs += if diff < Rational::zero() { -diff.clone() } else { diff.clone() };
            let d = &stats.h[y] / from_int(ni + 1) - &del[x].h[shifted(y, x)] / from_int(ni);
            sum_b += if d < Rational::zero() { -d } else { d };
        }
        t.ge(&bound_a, &sum_a, &[x], || format!("(a) at x = {x}"));
        t.ge(&bound_b, &sum_b, &[x], || format!("(b) at x = {x}"));
        let slack = &bound_a - &sum_abs;
        if abs_worst.as_ref().is_none_or(|(s, _)| slack < *s) {
            abs_worst = Some((slack, x));
        }
    }
    let mut r = t.finish();
    if let Some((slack, x)) = abs_worst {
        r.values.insert("abs_variant_min_slack".into(), rational::format(&slack));
        r.values.insert("abs_variant_element".into(), x.to_string());
        r.values.insert("abs_variant_holds".into(), (slack >= Rational::zero()).to_string());
    }
    Ok(r)
}

/// Report: gap/width, and for every ideal split `D ⊔ U` the ratio of
/// `min_{min U} h - max_{max D} h` to `w² e^w`, `w = max(|max D|, |min U|)`.
fn gapw(ctx: &Context) -> Result<CheckReport> {
    let p = ctx.poset;
    let n = p.n();
    let stats = ctx.stats()?;
    let mut r = CheckReport::new(Check::ConjGapW.name(), Severity::Report, Status::ReportOnly, n);
    if n == 0 {
        r.status = Status::NotApplicable;
        return Ok(r);
    }
    let g = gap(&stats.h);
    let w = p.width();
    let ratio = &g / from_int(w as i64);
    r.values.insert("gap".into(), rational::format(&g));
    r.values.insert("width".into(), w.to_string());
    r.extremal = Some(Extremal::exact("gap/width", &ratio, Vec::new()));
    let mut best: Option<(f64, Vec<usize>)> = None;
    let full = p.ground();
    for &d in ctx.lattice()?.ideals() {
        let u = full.difference(d);
        if d.is_empty() || u.is_empty() {
            continue;
        }
        r.instances += 1;
        let a = p.max_of(d);
        let b = p.min_of(u);
        let lo = b.iter().map(|y| &stats.h[y]).min().expect("non-empty");
        let hi = a.iter().map(|y| &stats.h[y]).max().expect("non-empty");
        let wd = a.len().max(b.len()) as f64;
        let v = rational::to_f64(&(lo - hi)) / (wd * wd * wd.exp());
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, d.to_vec()));
        }
    }
    if let Some((v, d)) = best {
        r.values.insert("max_split_gap_over_w2ew".into(), format!("{}", rational::round_sig(v)));
        r.values.insert("max_split_ideal".into(), format!("{d:?}"));
    }
    Ok(r)
}

/// Report: for every ideal split whose h-gap reaches the threshold, the best
/// `|X|^{-1} H(σ|_X)` over `X ⊆ max(D)` or `X ⊆ min(U)`, `2 <= |X| <= tau_cap`;
/// the extremal value is the smallest such best (the conjecture asks it to be large).
fn gaptau(ctx: &Context) -> Result<CheckReport> {
    let p = ctx.poset;
    let stats = ctx.stats()?;
    let lattice = ctx.lattice()?;
    let cap = ctx.config.balance.tau_cap;
    let mut r = CheckReport::new(Check::ConjGapTau.name(), Severity::Report, Status::ReportOnly, p.n());
    let full = p.ground();
    let mut worst: Option<(f64, ElementSet)> = None;
    let mut truncated = false;
    for &d in lattice.ideals() {
        let u = full.difference(d);
        if d.is_empty() || u.is_empty() {
            continue;
        }
        let lo = u.iter().map(|y| &stats.h[y]).min().expect("non-empty");
        let hi = d.iter().map(|y| &stats.h[y]).max().expect("non-empty");
        if lo - hi < ctx.config.gaptau_threshold {
            continue;
        }
        r.instances += 1;
        let mut best = 0.0f64;
        for side in [p.max_of(d), p.min_of(u)] {
            let xs = side.to_vec();
            truncated |= xs.len() > cap;
            for k in 2..=xs.len().min(cap) {
                for sub in xs.iter().copied().combinations(k) {
                    best = best.max(order_entropy(p, lattice, &sub) / k as f64);
                }
            }
        }
        if worst.as_ref().is_none_or(|(w, _)| best < *w) {
            worst = Some((best, d));
        }
    }
    match worst {
        Some((v, d)) => r.extremal = Some(Extremal::float("min over large-gap splits of best entropy rate", v, d.to_vec())),
        None => r.status = Status::NotApplicable,
    }
    r.values.insert("threshold".into(), rational::format(&ctx.config.gaptau_threshold));
    if truncated {
        r.note = Some(format!("witness sets larger than {cap} were not examined"));
    }
    Ok(r)
}

/// Longest chain length (in steps) from x up to every y, `None` when not `x <= y`.
fn longest_chains_from(p: &Poset, x: usize) -> Vec<Option<usize>> {
    let mut len = vec![None; p.n()];
    len[x] = Some(0);
    for z in p.topological_order() {
        if let Some(l) = len[z] {
            for w in p.upper_covers(z) {
                len[w] = Some(len[w].map_or(l + 1, |v: usize| v.max(l + 1)));
            }
        }
    }
    len
}

fn cover_distances(p: &Poset, x: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; p.n()];
    dist[x] = Some(0);
    let mut queue = VecDeque::from([x]);
    while let Some(z) = queue.pop_front() {
        let d = dist[z].expect("queued");
        for w in p.upper_covers(z).union(p.lower_covers(z)) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Report: the largest `|h_P(y) - h_{P-x}(y)|` overall and within each case:
/// (a) a chain `x < ... < y` of length at least n/4, (b) cover-graph distance
/// at least n/4, (c) `π(x) <= 1`.
fn hdeletex(ctx: &Context) -> Result<CheckReport> {
    let p = ctx.poset;
    let n = p.n();
    let stats = ctx.stats()?;
    let del = ctx.deletions()?;
    let mut r = CheckReport::new(Check::HDeleteX.name(), Severity::Report, Status::ReportOnly, n);
    let mut best: [Option<(Rational, usize, usize)>; 4] = Default::default();
    let far = |k: usize| 4 * k >= n;
    for x in 0..n {
        let chains = longest_chains_from(p, x);
        let dist = cover_distances(p, x);
        let case_c = p.incomparable(x).len() <= 1;
        for y in (0..n).filter(|&y| y != x) {
            r.instances += 1;
            let d = &stats.h[y] - &del[x].h[shifted(y, x)];
            let change = if d < Rational::zero() { -d } else { d };
            let cases = [true, chains[y].is_some_and(far), dist[y].is_some_and(far), case_c];
            for (slot, applies) in best.iter_mut().zip(cases) {
                if applies && slot.as_ref().is_none_or(|(b, _, _)| change > *b) {
                    *slot = Some((change.clone(), x, y));
                }
            }
        }
    }
    for (label, slot) in ["all", "a", "b", "c"].iter().zip(&best) {
        if let Some((v, x, y)) = slot {
            r.values.insert(format!("max_change_{label}"), format!("{} (x={x}, y={y})", rational::format(v)));
        }
    }
    match &best[0] {
        Some((v, x, y)) => r.extremal = Some(Extremal::exact("max |h_P(y) - h_{P-x}(y)|", v, vec![*x, *y])),
        None => r.status = Status::NotApplicable,
    }
    Ok(r)
}
