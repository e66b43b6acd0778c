//! Random linear extensions and order-polytope points.
//!
//! Every generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by
//! `seed_from_u64(seed)` on stream `stream` (see [`rng`]). Independent
//! streams for parallel workers come from distinct stream indices under the
//! same seed. The exact sampler is uniform on extensions; the Markov chain
//! is for demonstration and benchmarking only.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{first_extension, window_endpoints};
use crate::error::{Error, Result};
use crate::lattice::IdealLattice;
use crate::poset::Poset;
use crate::rational::ser;

/// Constraint tolerance for polytope points.
pub const POINT_TOLERANCE: f64 = 1e-12;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Monte Carlo estimate of a mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    #[serde(serialize_with = "ser::f64_sig")]
    pub mean: f64,
    #[serde(serialize_with = "ser::f64_sig")]
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    /// Mean and `sd / sqrt(samples)` of the given observations.
    pub fn from_samples(values: &[f64], seed: u64) -> Self {
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
        Estimate { mean, std_error: (var / m).sqrt(), samples: values.len() as u64, seed }
    }

    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn covers(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error + 1e-15
    }
}

/// A point of the unit cube indexed by poset elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopePoint {
    pub coords: Vec<f64>,
}

impl PolytopePoint {
    pub fn in_order_polytope(&self, p: &Poset) -> bool {
        let c = &self.coords;
        c.len() == p.n()
            && c.iter().all(|&v| (-POINT_TOLERANCE..=1.0 + POINT_TOLERANCE).contains(&v))
            && p.relations().iter().all(|&(x, y)| c[x] <= c[y] + POINT_TOLERANCE)
    }

    /// Largest sum of coordinates along a chain of `p`.
    pub fn max_chain_sum(&self, p: &Poset) -> f64 {
        let mut best = vec![0.0f64; p.n()];
        for x in p.topological_order() {
            let below = p.lower_covers(x).iter().map(|y| best[y]).fold(0.0, f64::max);
            best[x] = below + self.coords[x];
        }
        best.into_iter().fold(0.0, f64::max)
    }

    pub fn in_chain_polytope(&self, p: &Poset) -> bool {
        self.coords.len() == p.n()
            && self.coords.iter().all(|&v| v >= -POINT_TOLERANCE)
            && self.max_chain_sum(p) <= 1.0 + POINT_TOLERANCE
    }
}

/// Uniform integer in `[0, bound)` by rejection on `bits(bound)` random bits.
fn uniform_below<R: RngCore>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_bits = bits - 32 * (words as u64 - 1);
    let top_mask = if top_bits == 32 { u32::MAX } else { (1u32 << top_bits) - 1 };
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
        *digits.last_mut().unwrap() &= top_mask;
        let v = BigUint::from_slice(&digits);
        if &v < bound {
            return v;
        }
    }
}

/// Exactly uniform extension: walks the lattice top-down, removing maximal
/// `x` from the current ideal `I` with probability `down(I - x) / down(I)`.
pub fn sample_extension_exact<R: RngCore>(p: &Poset, lattice: &IdealLattice, rng: &mut R) -> Vec<usize> {
    let n = p.n();
    let mut seq = vec![0usize; n];
    let mut ideal = p.ground();
    for slot in (0..n).rev() {
        let total = lattice.down(ideal).expect("current set is an ideal");
        let mut pick = uniform_below(rng, total);
        let mut chosen = None;
        for x in p.max_of(ideal) {
            let w = lattice.down(ideal.without(x)).expect("ideal minus a maximal element");
            if &pick < w {
                chosen = Some(x);
                break;
            }
            pick -= w;
        }
        let x = chosen.expect("weights sum to down(I)");
        seq[slot] = x;
        ideal = ideal.without(x);
    }
    seq
}

/// Adjacent-transposition walk from the lexicographically first extension.
pub fn sample_extension_mcmc<R: Rng>(p: &Poset, steps: u64, rng: &mut R) -> Vec<usize> {
    let mut seq = first_extension(p);
    let n = p.n();
    if n < 2 {
        return seq;
    }
    for _ in 0..steps {
        let i = rng.random_range(0..n - 1);
        if !p.lt(seq[i], seq[i + 1]) {
            seq.swap(i, i + 1);
        }
    }
    seq
}

/// Uniform point of the order polytope: an exact extension fixes the simplex,
/// sorted uniforms fill it.
pub fn sample_order_polytope_point<R: Rng>(p: &Poset, lattice: &IdealLattice, rng: &mut R) -> PolytopePoint {
    let seq = sample_extension_exact(p, lattice, rng);
    let mut u: Vec<f64> = (0..p.n()).map(|_| rng.random::<f64>()).collect();
    u.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut coords = vec![0.0; p.n()];
    for (k, &x) in seq.iter().enumerate() {
        coords[x] = u[k];
    }
    PolytopePoint { coords }
}

/// `Q(x) = max_{y < x} F(y)` (0 for minimal `x`).
pub fn lower_window(p: &Poset, point: &PolytopePoint, x: usize) -> f64 {
    p.below(x).iter().map(|y| point.coords[y]).fold(0.0, f64::max)
}

/// `R(x) = min_{y > x} F(y)` (1 for maximal `x`).
pub fn upper_window(p: &Poset, point: &PolytopePoint, x: usize) -> f64 {
    p.above(x).iter().map(|y| point.coords[y]).fold(1.0, f64::min)
}

/// Volume-preserving transfer map onto the chain polytope: `F*(x) = F(x) - Q(x)`.
pub fn transfer_map(p: &Poset, point: &PolytopePoint) -> Result<PolytopePoint> {
    if !point.in_order_polytope(p) {
        return Err(Error::Domain(format!("{:?} is not in the order polytope", point.coords)));
    }
    let coords = (0..p.n()).map(|x| point.coords[x] - lower_window(p, point, x)).collect();
    Ok(PolytopePoint { coords })
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 samples, got {samples}")));
    }
    Ok(())
}

/// Estimate of `win(x) = E[r(x) - q(x)]` over exact draws.
pub fn estimate_win(p: &Poset, x: usize, samples: u64, seed: u64, ideal_cap: usize) -> Result<Estimate> {
    p.check_index(x)?;
    estimate_extension_statistic(p, samples, seed, ideal_cap, |seq| {
        let mut f = vec![0usize; p.n()];
        for (i, &y) in seq.iter().enumerate() {
            f[y] = i + 1;
        }
        let (q, r) = window_endpoints(p, &f, x);
        (r - q) as f64
    })
}

pub fn estimate_extension_statistic<F>(p: &Poset, samples: u64, seed: u64, ideal_cap: usize, stat: F) -> Result<Estimate>
where
    F: Fn(&[usize]) -> f64,
{
    check_samples(samples)?;
    let lattice = IdealLattice::build(p, ideal_cap)?;
    let mut r = rng(seed, 0);
    let values: Vec<f64> = (0..samples).map(|_| stat(&sample_extension_exact(p, &lattice, &mut r))).collect();
    Ok(Estimate::from_samples(&values, seed))
}

pub fn estimate_point_statistic<F>(p: &Poset, samples: u64, seed: u64, ideal_cap: usize, stat: F) -> Result<Estimate>
where
    F: Fn(&PolytopePoint) -> f64,
{
    check_samples(samples)?;
    let lattice = IdealLattice::build(p, ideal_cap)?;
    let mut r = rng(seed, 0);
    let values: Vec<f64> =
        (0..samples).map(|_| stat(&sample_order_polytope_point(p, &lattice, &mut r))).collect();
    Ok(Estimate::from_samples(&values, seed))
}

/// Probability of an event on a random extension.
pub fn estimate_extension_event<F>(p: &Poset, samples: u64, seed: u64, ideal_cap: usize, event: F) -> Result<Estimate>
where
    F: Fn(&[usize]) -> bool,
{
    estimate_extension_statistic(p, samples, seed, ideal_cap, |s| if event(s) { 1.0 } else { 0.0 })
}

/// Probability of an event on a uniform order-polytope point.
pub fn estimate_point_event<F>(p: &Poset, samples: u64, seed: u64, ideal_cap: usize, event: F) -> Result<Estimate>
where
    F: Fn(&PolytopePoint) -> bool,
{
    estimate_point_statistic(p, samples, seed, ideal_cap, |pt| if event(pt) { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: usize = 1 << 16;

    #[test]
    fn chain_sampler_is_deterministic_extension() {
        let c = Poset::chain(4);
        let l = IdealLattice::build(&c, CAP).unwrap();
        let mut r = rng(1, 0);
        for _ in 0..10 {
            assert_eq!(sample_extension_exact(&c, &l, &mut r), vec![0, 1, 2, 3]);
            assert_eq!(sample_extension_mcmc(&c, 50, &mut r), vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let p = Poset::antichain(5);
        let l = IdealLattice::build(&p, CAP).unwrap();
        let a: Vec<_> = { let mut r = rng(9, 3); (0..5).map(|_| sample_extension_exact(&p, &l, &mut r)).collect() };
        let b: Vec<_> = { let mut r = rng(9, 3); (0..5).map(|_| sample_extension_exact(&p, &l, &mut r)).collect() };
        let c: Vec<_> = { let mut r = rng(9, 4); (0..5).map(|_| sample_extension_exact(&p, &l, &mut r)).collect() };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_below_bounds() {
        let mut r = rng(0, 0);
        let bound = BigUint::from(5u32);
        let mut seen = [0; 5];
        for _ in 0..1000 {
            let v = uniform_below(&mut r, &bound);
            seen[usize::try_from(v.to_u32_digits().first().copied().unwrap_or(0)).unwrap()] += 1;
        }
        assert!(seen.iter().all(|&c| c > 150));
        let big = BigUint::from(1u32) << 100u32;
        assert!(uniform_below(&mut r, &big) < big);
    }

    #[test]
    fn transfer_map_examples() {
        let a = Poset::antichain(3);
        let pt = PolytopePoint { coords: vec![0.3, 0.9, 0.1] };
        assert_eq!(transfer_map(&a, &pt).unwrap(), pt);
        let c = Poset::chain(2);
        let out = transfer_map(&c, &PolytopePoint { coords: vec![0.2, 0.7] }).unwrap();
        assert!((out.coords[0] - 0.2).abs() < 1e-15 && (out.coords[1] - 0.5).abs() < 1e-15);
        assert!(transfer_map(&c, &PolytopePoint { coords: vec![0.7, 0.2] }).is_err());
    }

    #[test]
    fn polytope_points_respect_order() {
        let p = Poset::from_cover_relations(4, &[(0, 1), (0, 2), (2, 3)]).unwrap();
        let l = IdealLattice::build(&p, CAP).unwrap();
        let mut r = rng(5, 0);
        for _ in 0..200 {
            let pt = sample_order_polytope_point(&p, &l, &mut r);
            assert!(pt.in_order_polytope(&p));
            assert!(transfer_map(&p, &pt).unwrap().in_chain_polytope(&p));
        }
    }

    #[test]
    fn estimate_needs_samples() {
        assert!(estimate_win(&Poset::chain(2), 0, 10, 0, CAP).is_err());
    }

    #[test]
    fn estimate_from_samples() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0], 0);
        assert_eq!(e.mean, 2.5);
        assert!((e.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
    }
}
