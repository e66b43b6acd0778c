//! Order- and chain-polytope quantities derived from extension statistics.
//!
//! With `F` a uniform point of the order polytope `O(P)`:
//! `H(x) = E F(x) = h(x)/(n+1)`, `Win(x) = win(x)/(n+1)`,
//! `Var F(x) = σ²(x)/((n+1)(n+2)) + H(x)(1-H(x))/(n+2)`,
//! `d_x = e(P)/(n e(P-x))` and `|O(P)| = |C(P)| = e(P)/n!`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::engine::{exact_stats_with, Caps, ExtensionStats};
use crate::error::{Error, Result};
use crate::lattice::{count_extensions, IdealLattice};
use crate::poset::Poset;
use crate::rational::{self, from_counts, from_int, ser, Rational};
use crate::report::{CheckReport, Severity, Tracker};
#[cfg(test)]
use crate::report::Status;
use crate::sampler::{self, Estimate, PolytopePoint};

/// Largest n for the Monte Carlo chain-polytope volume.
pub const CHAIN_VOLUME_MAX_N: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryReport {
    pub n: usize,
    #[serde(rename = "H", serialize_with = "ser::rationals")]
    pub h_norm: Vec<Rational>,
    #[serde(rename = "Win", serialize_with = "ser::opt_rationals")]
    pub win_norm: Option<Vec<Rational>>,
    #[serde(rename = "varF", serialize_with = "ser::rationals")]
    pub var_f: Vec<Rational>,
    #[serde(serialize_with = "ser::rationals")]
    pub d: Vec<Rational>,
    #[serde(serialize_with = "ser::rational")]
    pub vol: Rational,
}

impl GeometryReport {
    pub fn win_norm(&self) -> Result<&[Rational]> {
        self.win_norm.as_deref().ok_or(Error::StatUnavailable("Win needs full enumeration"))
    }
}

/// `e(P - x)` for every x.
pub fn deletion_counts(p: &Poset, ideal_cap: usize) -> Result<Vec<BigUint>> {
    (0..p.n()).map(|x| count_extensions(&p.delete(x)?, ideal_cap)).collect()
}

pub fn geometry_report(p: &Poset, caps: Caps) -> Result<GeometryReport> {
    let lattice = IdealLattice::build(p, caps.ideal_cap)?;
    let stats = exact_stats_with(p, &lattice, caps.enum_cap);
    Ok(geometry_from(&stats, &deletion_counts(p, caps.ideal_cap)?))
}

/// Assemble the report from precomputed statistics and deletion counts.
pub fn geometry_from(stats: &ExtensionStats, deletions: &[BigUint]) -> GeometryReport {
    let n = stats.n;
    let n1 = from_int(n as i64 + 1);
    let n2 = from_int(n as i64 + 2);
    let h_norm: Vec<Rational> = stats.h.iter().map(|h| h / &n1).collect();
    let win_norm = stats.win.as_ref().map(|w| w.iter().map(|w| w / &n1).collect());
    let var_f = (0..n)
        .map(|x| {
            let hx = &h_norm[x];
            &stats.sigma2[x] / (&n1 * &n2) + hx * (Rational::one() - hx) / &n2
        })
        .collect();
    let nb = BigUint::from(n);
    let d = deletions.iter().map(|ex| from_counts(&stats.e, &(&nb * ex))).collect();
    let vol = from_counts(&stats.e, &rational::factorial(n));
    GeometryReport { n, h_norm, win_norm, var_f, d, vol }
}

/// `d_x <= Win(x) <= 2 d_x` for all x, and
/// `∏ d_x <= e(P)/n! <= e ∏ (n c_x) / n!` with `c_x = Win(x)/2`
/// (e replaced by a rational over-approximation).
pub fn corner_bounds(geo: &GeometryReport) -> Result<CheckReport> {
    let win = geo.win_norm()?;
    let n = geo.n;
    let mut t = Tracker::new("corner-bounds", Severity::Theorem, n);
    let two = from_int(2);
    for x in 0..n {
        t.ge(&win[x], &geo.d[x], &[x], || format!("Win({x}) >= d({x})"));
        t.ge(&(&two * &geo.d[x]), &win[x], &[x], || format!("2 d({x}) >= Win({x})"));
    }
    if n > 0 {
        let all: Vec<usize> = (0..n).collect();
        let prod_d = geo.d.iter().fold(Rational::one(), |acc, d| acc * d);
        t.ge(&geo.vol, &prod_d, &all, || "vol >= prod d".to_string());
        let nr = from_int(n as i64);
        let prod_c = win.iter().fold(Rational::one(), |acc, w| acc * &nr * w / &two);
        let upper = rational::e_upper() * prod_c / rational::from_biguint(&rational::factorial(n));
        t.ge(&upper, &geo.vol, &all, || "e prod(n c) / n! >= vol".to_string());
    }
    Ok(t.finish())
}

/// `varF(x) >= Win(x)^2/12` and the discrete `σ²(x) >= ((win(x)-1)^2 - 1)/12`.
///
/// Given the order of `P - x`, `f(x)` is uniform on `s = r - q - 1`
/// consecutive slots, so `σ² >= E[(s² - 1)/12] >= ((win - 1)² - 1)/12`,
/// with equality on antichains. The form without the `- 1` fails already
/// on a 2-antichain; its violations are counted in `values`, not judged.
pub fn win_variance(geo: &GeometryReport, stats: &ExtensionStats) -> Result<CheckReport> {
    let win_n = geo.win_norm()?;
    let win = stats.win()?;
    let twelve = from_int(12);
    let one = Rational::one();
    let mut t = Tracker::new("win-variance", Severity::Theorem, geo.n);
    let mut uncorrected_failures = 0usize;
    for x in 0..geo.n {
        t.ge(&geo.var_f[x], &(&win_n[x] * &win_n[x] / &twelve), &[x], || format!("varF({x}) >= Win^2/12"));
        let w1 = &win[x] - &one;
        let sq = &w1 * &w1;
        t.ge(&stats.sigma2[x], &((&sq - &one) / &twelve), &[x], || format!("sigma2({x}) >= ((win-1)^2-1)/12"));
        if stats.sigma2[x] < &sq / &twelve {
            uncorrected_failures += 1;
        }
    }
    let mut r = t.finish();
    r.values.insert("uncorrected_discrete_form_failures".into(), uncorrected_failures.to_string());
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinVarReport {
    /// `Win(x)/varF(x)`.
    #[serde(serialize_with = "ser::rationals")]
    pub ratios: Vec<Rational>,
    #[serde(serialize_with = "ser::rational")]
    pub min_ratio: Rational,
    pub min_element: usize,
    /// `varF(x) <= Win(x) H(x)(1-H(x)) / (2 + Win(x))` per element.
    pub varf_prime: Vec<bool>,
    /// The minimal-element form `varF(x) <= H²(1-H)/(1+H)`; `None` when x is not minimal.
    pub minimal_form: Vec<Option<bool>>,
}

pub fn conjecture_winvar_ratio(p: &Poset, geo: &GeometryReport) -> Result<WinVarReport> {
    let win = geo.win_norm()?;
    let one = Rational::one();
    let two = from_int(2);
    let mut ratios = Vec::with_capacity(geo.n);
    let mut varf_prime = Vec::with_capacity(geo.n);
    let mut minimal_form = Vec::with_capacity(geo.n);
    for x in 0..geo.n {
        let h = &geo.h_norm[x];
        let v = &geo.var_f[x];
        ratios.push(&win[x] / v);
        varf_prime.push(*v <= &win[x] * h * (&one - h) / (&two + &win[x]));
        minimal_form.push(if p.below(x).is_empty() { Some(*v <= h * h * (&one - h) / (&one + h)) } else { None });
    }
    let (min_element, min_ratio) = ratios
        .iter()
        .enumerate()
        .fold(None::<(usize, &Rational)>, |best, (x, r)| match best {
            Some((_, b)) if b <= r => best,
            _ => Some((x, r)),
        })
        .map(|(x, r)| (x, r.clone()))
        .unwrap_or((0, Rational::zero()));
    Ok(WinVarReport { ratios, min_ratio, min_element, varf_prime, minimal_form })
}

/// Soft check of the sharpened variance conjecture, reporting the min ratio.
pub fn winvar_check(p: &Poset, geo: &GeometryReport) -> Result<CheckReport> {
    let win = geo.win_norm()?;
    let one = Rational::one();
    let two = from_int(2);
    let mut t = Tracker::new("conj-winvar", Severity::Conjecture, geo.n);
    for x in 0..geo.n {
        let h = &geo.h_norm[x];
        let bound = &win[x] * h * (&one - h) / (&two + &win[x]);
        t.ge(&bound, &geo.var_f[x], &[x], || format!("Win H(1-H)/(2+Win) >= varF at {x}"));
        if p.below(x).is_empty() {
            let bound = h * h * (&one - h) / (&one + h);
            t.ge(&bound, &geo.var_f[x], &[x], || format!("H^2(1-H)/(1+H) >= varF at minimal {x}"));
        }
    }
    let mut r = t.finish();
    if geo.n > 0 {
        let w = conjecture_winvar_ratio(p, geo)?;
        r.values.insert("min_ratio".into(), rational::format(&w.min_ratio));
        r.values.insert("min_ratio_element".into(), w.min_element.to_string());
    }
    Ok(r)
}

/// Monte Carlo `|C(P)|`: hit rate of uniform cube points, `n <= 5`.
pub fn estimate_chain_polytope_volume(p: &Poset, samples: u64, seed: u64) -> Result<Estimate> {
    if p.n() > CHAIN_VOLUME_MAX_N {
        return Err(Error::SizeCapExceeded { what: "chain polytope volume", size: p.n(), cap: CHAIN_VOLUME_MAX_N });
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let mut rng = sampler::rng(seed, 0);
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let pt = PolytopePoint { coords: (0..p.n()).map(|_| rng.random::<f64>()).collect() };
            if pt.in_chain_polytope(p) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok(Estimate::from_samples(&values, seed))
}

/// `H(x) = Win(x)/2` for every minimal x.
pub fn winh(p: &Poset, geo: &GeometryReport) -> Result<CheckReport> {
    let win = geo.win_norm()?;
    let two = from_int(2);
    let mut t = Tracker::new("winh", Severity::Theorem, geo.n);
    for x in p.min_set() {
        t.eq(&geo.h_norm[x], &(&win[x] / &two), &[x], || format!("H({x}) = Win({x})/2"));
    }
    Ok(t.finish())
}
