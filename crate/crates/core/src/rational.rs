//! Exact rational helpers and the `"p/q"` string encoding used by every file format.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `2^-k` as an exact rational.
pub fn pow2_inv(k: usize) -> Q {
    Q::new(BigInt::one(), BigInt::one() << k)
}

/// Renders `p/q`, or `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let parsed = Q::from_str(t).map_err(|_| Error::invalid(format!("bad rational `{s}`")))?;
    Ok(parsed)
}

/// Six-digit decimal rendering, for display only.
pub fn decimal(x: &Q) -> String {
    let scaled = (x * qi(1_000_000)).round();
    let v = scaled.to_integer().to_f64().unwrap_or(f64::NAN) / 1e6;
    format!("{v:.6}")
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Serde adapter storing a rational as its `p/q` string.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let raw = String::deserialize(d)?;
        parse_q(&raw).map_err(serde::de::Error::custom)
    }
}

/// Same as [`serde_q`] for vectors of rationals.
pub mod serde_q_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        xs.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|r| parse_q(r).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_strings() {
        for s in ["0", "3", "-7/2", "1/1024"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("6/4").unwrap(), q(3, 2));
        assert!(parse_q("1/0").is_err() || parse_q("abc").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&q(1, 3)), "0.333333");
        assert_eq!(pow2_inv(10), q(1, 1024));
    }
}
