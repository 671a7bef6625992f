//! Scalar abstractions.
//!
//! [`Real`] covers the floating-point types the evaluators are generic over
//! (`f32`, `f64`). [`Field`] covers the coefficient types of piecewise
//! polynomials, where exact rationals sit next to `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every `Real` can represent (a rounding of) any `f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Coefficient field for piecewise polynomials.
pub trait Field:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    const EXACT: bool;

    fn ratio(numer: i64, denom: i64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact conversion of a finite `f64` (binary fractions are exact rationals).
    fn from_f64_exact(v: f64) -> Option<Self>;

    fn pow2(k: i32) -> Self {
        let two = Self::from_i64(2).unwrap();
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc * two.clone();
        }
        if k < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    /// Text form used in JSON and CSV (`"p/q"` for rationals).
    fn to_text(&self) -> String;

    /// Accepts integers, decimals and `"p/q"`.
    fn from_text(s: &str) -> Option<Self>;

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_f64_exact(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn pow2(k: i32) -> Self {
        2f64.powi(k)
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }

    fn from_text(s: &str) -> Option<Self> {
        s.trim().parse::<f64>().ok().or_else(|| parse_rational(s).and_then(|r| r.to_f64()))
    }
}

impl Field for BigRational {
    const EXACT: bool = true;

    fn ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_text(&self) -> String {
        format_rational(self)
    }

    fn from_text(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

/// Parses `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    // decimal: exact base-10 value, not the nearest binary float
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exponent) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut r = BigRational::from_integer(n * sign);
    for _ in 0..scale.unsigned_abs() {
        if scale > 0 {
            r *= ten.clone();
        } else {
            r /= ten.clone();
        }
    }
    Some(r)
}

/// Renders a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter storing rationals as `"p/q"` strings and accepting numbers too.
pub mod rational_serde {
    use super::{format_rational, parse_rational};
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(de::Error::custom(format!("expected rational, got {other}"))),
        };
        parse_rational(&text).ok_or_else(|| de::Error::custom(format!("bad rational {text:?}")))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            let raw = Vec::<serde_json::Value>::deserialize(d)?;
            raw.into_iter()
                .map(|v| {
                    let text = match &v {
                        serde_json::Value::String(s) => s.clone(),
                        serde_json::Value::Number(n) => n.to_string(),
                        other => return Err(de::Error::custom(format!("expected rational, got {other}"))),
                    };
                    parse_rational(&text).ok_or_else(|| de::Error::custom(format!("bad rational {text:?}")))
                })
                .collect()
        }
    }
}

/// Log-spaced grid of `n` points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/7").unwrap(), BigRational::ratio(1, 7));
        assert_eq!(parse_rational("-3").unwrap(), BigRational::ratio(-3, 1));
        assert_eq!(parse_rational("0.125").unwrap(), BigRational::ratio(1, 8));
        assert_eq!(parse_rational("1.5e1").unwrap(), BigRational::ratio(15, 1));
        assert_eq!(parse_rational("0.1").unwrap(), BigRational::ratio(1, 10));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn pow2_is_exact() {
        let r = <BigRational as Field>::pow2(-80);
        assert_eq!(r * <BigRational as Field>::pow2(80), BigRational::one());
        assert_eq!(<f64 as Field>::pow2(-3), 0.125);
    }

    #[test]
    fn logspace_endpoints() {
        let g = logspace(0.1, 10.0, 3);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[1] - 1.0).abs() < 1e-14 && (g[2] - 10.0).abs() < 1e-13);
    }
}
