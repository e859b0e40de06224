//! Scalars: exact rationals and a tagged real that remembers whether it is exact.
//!
//! Every vector and functional in the crate carries rational coordinates. Norm
//! values are rational for polyhedral models and become floating point only
//! when a smooth `l_p` norm (1 < p < inf) is involved.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

/// Global tolerance for comparisons that involve floating-point values.
pub const TOL: f64 = 1e-9;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exact binary expansion of a finite float.
pub fn q_from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // ratio of huge integers; fall back through the float division of both parts
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// `1/2^k`.
pub fn dyadic(k: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << k)
}

/// Parses `"num/den"`, an integer, or a finite decimal such as `"0.125"` exactly.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.trim_start().starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let mag = int_part.abs() * &scale + frac_part;
        let num = if neg { -mag } else { mag };
        return Ok(Q::new(num, scale));
    }
    BigInt::from_str(s)
        .map(Q::from_integer)
        .map_err(|_| bad())
}

/// Serializes as `"num/den"`.
pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exact square root when both numerator and denominator are perfect squares.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &n * &n == *x.numer() && &d * &d == *x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Largest dyadic rational `m/2^bits` not exceeding `x`.
pub fn floor_dyadic(x: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = (x * Q::from_integer(scale.clone())).floor();
    scaled / Q::from_integer(scale)
}

pub fn min_q<'a>(a: &'a Q, b: &'a Q) -> &'a Q {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_q<'a>(a: &'a Q, b: &'a Q) -> &'a Q {
    if a >= b {
        a
    } else {
        b
    }
}

pub mod serde_q {
    //! `"num/den"` string (de)serialization for [`Q`](super::Q).
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_value(&v).map_err(serde::de::Error::custom)
    }

    pub fn from_value(v: &serde_json::Value) -> Result<Q> {
        match v {
            serde_json::Value::String(s) => parse_q(s),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(qi(i))
                } else {
                    // decimal literal, read through its shortest representation
                    parse_q(&n.to_string())
                }
            }
            other => Err(Error::Parse(format!("expected rational, got {other}"))),
        }
    }
}

pub mod serde_q_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = xs.iter().map(format_q).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(serde_q::from_value)
            .collect::<Result<_>>()
            .map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_pairs {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[(Q, Q)], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[String; 2]> = xs.iter().map(|(a, b)| [format_q(a), format_q(b)]).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<(Q, Q)>, D::Error> {
        let v = Vec::<[serde_json::Value; 2]>::deserialize(d)?;
        v.iter()
            .map(|[a, b]| Ok((serde_q::from_value(a)?, serde_q::from_value(b)?)))
            .collect::<Result<_>>()
            .map_err(serde::de::Error::custom)
    }
}

/// A real number that is either known exactly or only to floating-point accuracy.
///
/// Arithmetic stays exact while both operands are exact. Comparisons between
/// exact values are exact; any comparison touching an approximate value uses
/// [`TOL`].
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(Q),
    Approx(f64),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(Q::zero())
    }

    pub fn one() -> Self {
        Real::Exact(Q::one())
    }

    pub fn int(n: i64) -> Self {
        Real::Exact(qi(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(x) => q_to_f64(x),
            Real::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Q> {
        match self {
            Real::Exact(x) => Some(x),
            Real::Approx(_) => None,
        }
    }

    /// Rational value: exact, or the exact binary value of the float.
    pub fn to_q(&self) -> Q {
        match self {
            Real::Exact(x) => x.clone(),
            Real::Approx(x) => q_from_f64(*x).unwrap_or_else(|_| Q::zero()),
        }
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Exact(x) => Real::Exact(x.abs()),
            Real::Approx(x) => Real::Approx(x.abs()),
        }
    }

    pub fn sqrt(&self) -> Real {
        match self {
            Real::Exact(x) => match exact_sqrt(x) {
                Some(r) => Real::Exact(r),
                None => Real::Approx(q_to_f64(x).sqrt()),
            },
            Real::Approx(x) => Real::Approx(x.sqrt()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(x) => x.is_zero(),
            Real::Approx(x) => *x == 0.0,
        }
    }

    fn binop(&self, other: &Real, fq: impl Fn(&Q, &Q) -> Q, ff: impl Fn(f64, f64) -> f64) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(fq(a, b)),
            _ => Real::Approx(ff(self.to_f64(), other.to_f64())),
        }
    }

    pub fn add(&self, o: &Real) -> Real {
        self.binop(o, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.binop(o, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, o: &Real) -> Real {
        self.binop(o, |a, b| a * b, |a, b| a * b)
    }

    /// Division; the caller guarantees a nonzero divisor.
    pub fn div(&self, o: &Real) -> Real {
        self.binop(o, |a, b| a / b, |a, b| a / b)
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Exact(x) => Real::Exact(-x),
            Real::Approx(x) => Real::Approx(-x),
        }
    }

    pub fn max(&self, o: &Real) -> Real {
        if self.cmp_tol(o) == std::cmp::Ordering::Less {
            o.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, o: &Real) -> Real {
        if self.cmp_tol(o) == std::cmp::Ordering::Greater {
            o.clone()
        } else {
            self.clone()
        }
    }

    /// Exact comparison for exact operands, tolerance-aware otherwise.
    pub fn cmp_tol(&self, o: &Real) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), o.to_f64());
                let scale = 1.0f64.max(a.abs()).max(b.abs());
                if (a - b).abs() <= TOL * scale {
                    Equal
                } else if a < b {
                    Less
                } else {
                    Greater
                }
            }
        }
    }

    /// `self > o`; approximate operands must clear the tolerance band.
    pub fn gt(&self, o: &Real) -> bool {
        self.cmp_tol(o) == std::cmp::Ordering::Greater
    }

    /// `self >= o`, with the tolerance band counted as equal.
    pub fn ge(&self, o: &Real) -> bool {
        self.cmp_tol(o) != std::cmp::Ordering::Less
    }

    pub fn lt(&self, o: &Real) -> bool {
        self.cmp_tol(o) == std::cmp::Ordering::Less
    }

    pub fn le(&self, o: &Real) -> bool {
        self.cmp_tol(o) != std::cmp::Ordering::Greater
    }

    pub fn approx_eq(&self, o: &Real) -> bool {
        self.cmp_tol(o) == std::cmp::Ordering::Equal
    }
}

impl From<Q> for Real {
    fn from(x: Q) -> Self {
        Real::Exact(x)
    }
}

impl From<&Q> for Real {
    fn from(x: &Q) -> Self {
        Real::Exact(x.clone())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(x) => write!(f, "{}", format_q(x)),
            Real::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Exact(x) => s.serialize_str(&format_q(x)),
            Real::Approx(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) => parse_q(s).map(Real::Exact).map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(Real::Approx)
                .ok_or_else(|| serde::de::Error::custom("bad number")),
            _ => Err(serde::de::Error::custom("expected real")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_q("4/5").unwrap(), q(4, 5));
        assert_eq!(parse_q("-3").unwrap(), qi(-3));
        assert_eq!(parse_q("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_q("-1.5").unwrap(), q(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn exact_sqrt_of_squares_only() {
        assert_eq!(exact_sqrt(&q(9, 25)), Some(q(3, 5)));
        assert_eq!(exact_sqrt(&q(1, 2)), None);
        assert!(Real::Exact(q(1, 2)).sqrt().as_exact().is_none());
    }

    #[test]
    fn mixed_arithmetic_degrades_to_approx() {
        let a = Real::Exact(q(1, 3));
        let b = Real::Approx(0.5);
        assert!(a.add(&a).is_exact());
        assert!(!a.add(&b).is_exact());
        assert!(a.add(&b).approx_eq(&Real::Approx(5.0 / 6.0)));
    }

    #[test]
    fn floor_dyadic_rounds_down() {
        assert_eq!(floor_dyadic(&q(1, 3), 4), q(5, 16));
        assert_eq!(floor_dyadic(&q(1, 2), 4), q(1, 2));
    }

    proptest! {
        #[test]
        fn format_parse_roundtrip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let x = q(n, d);
            prop_assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
        }
    }
}
