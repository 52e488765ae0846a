//! Exact rational positions and frequencies.
//!
//! Every lattice in scope has rational spacing and offset, so positions are
//! carried as `Ratio<i128>`; phases `e^{2πi s x}` are reduced modulo one
//! exactly before they touch floating point.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = Ratio<i128>;

pub fn q(num: i128, den: i128) -> Q {
    Q::new(num, den)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn to_f64(x: &Q) -> f64 {
    // numerator and denominator may exceed 2^53; the ratio is what matters
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// `x - floor(x)`, in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

/// `e^{2πi x}` with the argument reduced modulo one exactly.
pub fn cis(x: &Q) -> Complex64 {
    let r = to_f64(&frac(x));
    Complex64::from_polar(1.0, 2.0 * PI * r)
}

/// Greatest common divisor of two positive rationals: the largest `g` with
/// `a/g` and `b/g` both integers.
pub fn gcd(a: &Q, b: &Q) -> Q {
    let den = a.denom().lcm(b.denom());
    let an = a.numer() * (den / a.denom());
    let bn = b.numer() * (den / b.denom());
    Q::new(an.gcd(&bn), den)
}

/// Least common multiple of two positive rationals.
pub fn lcm(a: &Q, b: &Q) -> Q {
    let g = gcd(a, b);
    (a * b / g).abs()
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.3"` or `"-1.25e-1"`.
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let d: i128 = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Q> {
    let bad = || Error::Parse(format!("bad number {s:?}"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, fracpart) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && fracpart.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{fracpart}");
    let mut num: i128 = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - fracpart.len() as i32;
    let p = 10i128.checked_pow(scale.unsigned_abs()).ok_or_else(bad)?;
    Ok(if scale >= 0 {
        Q::from_integer(num * p)
    } else {
        Q::new(num, p)
    })
}

/// Exact rational for the shortest decimal representation of `x`.
pub fn from_f64(x: f64) -> Result<Q> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite value {x}")));
    }
    parse_decimal(&format!("{x:e}"))
}

pub fn format(x: &Q) -> String {
    if x.denom() == &1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_zero(x: &Q) -> bool {
    x.is_zero()
}

/// Serde adapter: rationals travel as `"p/q"` strings; numbers are accepted
/// on input.
pub mod serde_q {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Str(String),
        Int(i64),
        Float(f64),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Str(s) => parse(&s).map_err(de::Error::custom),
            Repr::Int(i) => Ok(Q::from_integer(i as i128)),
            Repr::Float(f) => from_f64(f).map_err(de::Error::custom),
        }
    }
}
