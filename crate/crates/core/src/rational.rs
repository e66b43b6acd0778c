//! Exact rational helpers and the `"p/q"` text form used in every report.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serializer;

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_counts(num: &BigUint, den: &BigUint) -> Rational {
    Rational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn from_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn from_biguint(v: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v.clone()))
}

/// Lowest terms, always with an explicit denominator (`"0/1"`, `"3/1"`).
pub fn format(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => {
            if let Ok(n) = s.parse::<BigInt>() {
                return Some(Rational::from_integer(n));
            }
            // Decimal literal such as 0.25.
            let (int, frac) = s.split_once('.')?;
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches('-'), frac);
            let n: BigInt = digits.parse().ok()?;
            let d = num_traits::pow(BigInt::from(10), frac.len());
            let q = Rational::new(n, d);
            Some(if neg { -q } else { q })
        }
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// 367879441/10^9, strictly below 1/e. Used where 1/e is a lower bound to beat.
pub fn inv_e_lower() -> Rational {
    Rational::new(BigInt::from(367_879_441u64), BigInt::from(1_000_000_000u64))
}

/// 27182818285/10^10, strictly above e. Used where e appears in an upper bound.
pub fn e_upper() -> Rational {
    Rational::new(BigInt::from(27_182_818_285u64), BigInt::from(10_000_000_000u64))
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Round to 10 significant digits for stable textual output.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.9e}", x).parse().unwrap_or(x)
}

/// Serde adapters emitting rationals as `"p/q"` strings.
pub mod ser {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(q))
    }

    pub fn rationals<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format))
    }

    pub fn opt_rationals<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => rationals(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn opt_rational<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(q) => rational(q, s),
            None => s.serialize_none(),
        }
    }

    pub fn rational_matrix<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            seq.serialize_element(&row.iter().map(format).collect::<Vec<_>>())?;
        }
        seq.end()
    }

    pub fn opt_rational_matrix<S: Serializer>(
        m: &Option<Vec<Vec<Rational>>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match m {
            Some(m) => rational_matrix(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn biguint<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn f64_sig<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(round_sig(*v))
    }

    pub fn opt_f64_sig<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_f64(round_sig(*v)),
            None => s.serialize_none(),
        }
    }
}
