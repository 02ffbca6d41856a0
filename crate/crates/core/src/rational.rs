//! Exact probabilities and their text form.
//!
//! Every ontic computation runs on [`Prob`], an arbitrary-precision rational.
//! Values cross file and JSON boundaries as `"num/den"` strings (or a bare
//! integer such as `"0"` or `"1"`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::Error;

pub type Prob = BigRational;

/// Largest denominator accepted when snapping a float onto a rational.
pub const SNAP_MAX_DENOMINATOR: i64 = 1_000_000;

/// Tolerance used when snapping and when comparing float-derived values.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub fn ratio(num: i64, den: i64) -> Prob {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Prob {
    BigRational::from_integer(BigInt::from(n))
}

pub fn zero() -> Prob {
    Prob::zero()
}

pub fn one() -> Prob {
    Prob::one()
}

pub fn to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

pub fn format(p: &Prob) -> String {
    if p.denom().is_one() {
        p.numer().to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

pub fn parse(s: &str) -> Result<Prob, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

/// Continued-fraction convergents of `x` with denominators up to `max_den`.
fn convergents(x: f64, max_den: i64) -> Vec<Prob> {
    let Some(target) = BigRational::from_float(x) else {
        return Vec::new();
    };
    let max_den = BigInt::from(max_den);
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut n = target.numer().clone();
    let mut d = target.denom().clone();
    let mut out = Vec::new();
    while !d.is_zero() {
        let (a, r) = n.div_mod_floor(&d);
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        out.push(BigRational::new(p2.clone(), q2.clone()));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        (n, d) = (d, r);
    }
    out
}

/// Snaps `x` onto the simplest rational (denominator at most
/// [`SNAP_MAX_DENOMINATOR`]) that lies within [`FLOAT_TOLERANCE`].
pub fn snap(x: f64) -> Option<Prob> {
    convergents(x, SNAP_MAX_DENOMINATOR)
        .into_iter()
        .find(|c| (to_f64(c) - x).abs() <= FLOAT_TOLERANCE)
}

/// Snaps when possible, otherwise keeps the exact binary value of the float.
/// The flag reports whether the snap succeeded.
pub fn rationalize(x: f64) -> (Prob, bool) {
    match snap(x) {
        Some(r) => (r, true),
        None => (
            BigRational::from_float(x).unwrap_or_else(Prob::zero),
            false,
        ),
    }
}

pub mod serde_prob {
    use super::*;

    pub fn serialize<S: Serializer>(p: &Prob, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(p))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Prob, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_opt_prob {
    use super::*;

    pub fn serialize<S: Serializer>(p: &Option<Prob>, s: S) -> Result<S::Ok, S::Error> {
        match p {
            Some(p) => s.serialize_some(&format(p)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Prob>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

pub mod serde_prob_map {
    use super::*;
    use indexmap::IndexMap;
    use serde::ser::SerializeMap;

    pub fn serialize<S: Serializer>(m: &IndexMap<String, Prob>, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &format(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<IndexMap<String, Prob>, D::Error> {
        let raw = IndexMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| parse(&v).map(|p| (k, p)).map_err(serde::de::Error::custom))
            .collect()
    }
}
