//! Exact rational helpers shared by every module.
//!
//! All exact quantities are `BigRational`, which num-rational keeps in lowest
//! terms with a positive denominator.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Shorthand constructor for small literals, `rat(3, 4)` is 3/4.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not an exact fraction: {:?}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

/// Parses `p`, `p/q` or `-p/q`. Decimal points are rejected so that every
/// parameter entering a verdict is exact as written.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `p/q`, with `/1` elided for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// The rational with the smallest denominator strictly inside `(lo, hi)`.
///
/// Ties on denominator go to the smallest absolute numerator, which makes the
/// answer unique (it is the Stern-Brocot ancestor of the interval).
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "simplest_between needs lo < hi");
    if lo.is_negative() && hi.is_positive() {
        return Rational::zero();
    }
    if !hi.is_positive() {
        return -simplest_in_open(&-hi, Some(&-lo));
    }
    simplest_in_open(lo, Some(hi))
}

// Interval (lo, hi) with 0 <= lo; hi = None stands for +infinity.
fn simplest_in_open(lo: &Rational, hi: Option<&Rational>) -> Rational {
    let fl = lo.floor();
    let next = &fl + Rational::one();
    match hi {
        None => return next,
        Some(h) if &next < h => return next,
        _ => {}
    }
    let hi = hi.expect("finite upper bound");
    // (lo, hi) sits inside [fl, fl + 1]; recurse on reciprocals of the
    // fractional parts.
    let new_lo = (hi - &fl).recip();
    let frac = lo - &fl;
    let inner = if frac.is_zero() {
        simplest_in_open(&new_lo, None)
    } else {
        let new_hi = frac.recip();
        simplest_in_open(&new_lo, Some(&new_hi))
    };
    fl + inner.recip()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a Rational>,
{
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Serde adapters writing rationals as canonical fraction strings.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let text = Vec::<String>::deserialize(d)?;
            text.iter()
                .map(|t| parse_rational(t).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(r) => s.serialize_some(&format_rational(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let text = Option::<String>::deserialize(d)?;
            text.map(|t| parse_rational(&t).map_err(D::Error::custom))
                .transpose()
        }
    }
}
