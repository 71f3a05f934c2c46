//! Coefficient fields: exact rationals and binary64.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic mode of a value or file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(crate::Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// A real coefficient field usable inside Clifford numbers.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    /// `num / den` rounded into the field (exact for rationals).
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self;
    fn to_f64(&self) -> f64;
    /// Canonical text form (see [`format_rational`] and [`format_f64`]).
    fn canonical(&self) -> String;
    /// Parse a numeric literal: `"p/q"`, an integer or a decimal.
    fn parse_literal(s: &str) -> crate::Result<Self>;

    fn from_biguint(v: &BigUint) -> Self {
        Self::from_ratio(&BigInt::from(v.clone()), &BigInt::one())
    }

    /// `self / den` for a positive integer denominator.
    fn div_biguint(&self, den: &BigUint) -> Self {
        self.clone() * Self::from_ratio(&BigInt::one(), &BigInt::from(den.clone()))
    }

    fn square(&self) -> Self {
        self.clone() * self
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        num_traits::ToPrimitive::to_f64(&BigRational::new(num.clone(), den.clone())).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn canonical(&self) -> String {
        format_f64(*self)
    }
    fn parse_literal(s: &str) -> crate::Result<Self> {
        if s.contains('/') {
            return Ok(Scalar::to_f64(&parse_rational(s)?));
        }
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| crate::Error::Parse(format!("invalid number {s:?}")))
    }
    fn div_biguint(&self, den: &BigUint) -> Self {
        match den.to_f64() {
            Some(d) if d.is_finite() => self / d,
            _ => self.signum() * (self.abs().ln() - ln_biguint(den)).exp(),
        }
    }
}

/// Exact rational scalar.
pub type Rational = BigRational;

impl Scalar for BigRational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            let sign = if self.is_negative() { -1.0 } else { 1.0 };
            let ln = ln_biguint(&self.numer().abs().to_biguint().unwrap())
                - ln_biguint(&self.denom().to_biguint().unwrap());
            sign * ln.exp()
        })
    }
    fn canonical(&self) -> String {
        format_rational(self)
    }
    fn parse_literal(s: &str) -> crate::Result<Self> {
        parse_rational(s)
    }
}

/// Natural logarithm of a big unsigned integer, accurate to binary64.
pub fn ln_biguint(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit mantissa");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Parse `"p/q"`, `"p"` or a decimal literal such as `"-1.25e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> crate::Result<BigRational> {
    let s = s.trim();
    let bad = || crate::Error::Parse(format!("invalid rational literal {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(crate::Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if frac_part.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Canonical text form of an exact rational: `"p"` for integers, otherwise `"p/q"`.
pub fn format_rational(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Canonical text form of a float: 17 significant digits.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return "0.0000000000000000e0".to_string();
    }
    format!("{v:.16e}")
}
