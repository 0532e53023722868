//! Exact rational helpers. Every distance in the crate is a `Q`.

use crate::error::{Error, Result};
use crate::Q;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Smallest integer `>= v`.
pub fn ceil_i64(v: &Q) -> i64 {
    let (n, d) = (*v.numer(), *v.denom());
    Integer::div_ceil(&n, &d)
}

pub fn floor_i64(v: &Q) -> i64 {
    let (n, d) = (*v.numer(), *v.denom());
    Integer::div_floor(&n, &d)
}

/// `min{n >= 1 : v <= n}`; levels are never below one.
pub fn level_of(v: &Q) -> u64 {
    ceil_i64(v).max(1) as u64
}

pub fn to_f64(v: &Q) -> f64 {
    v.numer().to_f64().unwrap_or(f64::NAN) / v.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn abs_diff(a: i64, b: i64) -> Q {
    q((a - b).abs())
}

pub fn format_q(v: &Q) -> String {
    if v.denom() == &1 {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(q(s.parse().map_err(|_| bad())?)),
    }
}

pub fn is_nonnegative(v: &Q) -> bool {
    !v.is_negative()
}

/// Serde adapter: integers become JSON numbers, proper fractions become `"p/q"` strings.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.denom() == &1 {
            s.serialize_i64(*v.numer())
        } else {
            s.serialize_str(&format_q(v))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(q(n)),
            Raw::Str(s) => parse_q(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// A `Q` that serializes through [`serde_q`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactQ(pub Q);

impl Serialize for ExactQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_q::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for ExactQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_q::deserialize(d).map(ExactQ)
    }
}

impl From<Q> for ExactQ {
    fn from(v: Q) -> Self {
        ExactQ(v)
    }
}

impl std::fmt::Display for ExactQ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_q(&self.0))
    }
}
