//! Real scalars in one of two modes: exact reduced rationals, or `f64` compared
//! with a process-wide tolerance.
//!
//! Arithmetic between two exact values stays exact. Any operation touching a
//! float yields a float. `PartialEq`/`PartialOrd` compare raw values; the
//! `*_tol` methods apply the float tolerance and are what decision procedures use.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(DEFAULT_TOLERANCE.to_bits());

/// Comparison tolerance used whenever a float takes part in a decision.
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(AtomicOrdering::Relaxed))
}

pub fn set_tolerance(tol: f64) {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    TOLERANCE_BITS.store(tol.to_bits(), AtomicOrdering::Relaxed);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(v: f64) -> Self {
        debug_assert!(v.is_finite(), "non-finite float scalar");
        Scalar::Float(v)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Exact(BigRational::from_integer(n))
    }

    /// `2^-k` as an exact value.
    pub fn pow2_neg(k: u32) -> Self {
        Scalar::Exact(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    /// Smallest multiple of `2^-20` that is at least `v`.
    pub fn rational_upper_bound(v: f64) -> Self {
        let scaled = v * f64::from(1u32 << 20);
        let num = BigInt::from_f64(scaled.ceil()).expect("finite bound");
        Scalar::Exact(BigRational::new(num, BigInt::one() << 20u32))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or_else(|| {
                if r.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
            Scalar::Float(v) => *v,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    /// Exact binary value of a float, or the rational itself.
    pub fn to_exact(&self) -> Scalar {
        match self {
            Scalar::Exact(_) => self.clone(),
            Scalar::Float(v) => Scalar::Exact(BigRational::from_float(*v).expect("finite float")),
        }
    }

    pub fn in_mode(&self, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => self.to_exact(),
            Mode::Float => self.to_float(),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(v) => Scalar::Float(v.abs()),
        }
    }

    /// Sign, treating floats within the tolerance of zero as zero.
    pub fn sign(&self) -> Ordering {
        match self {
            Scalar::Exact(r) => r.cmp(&BigRational::zero()),
            Scalar::Float(v) => {
                if v.abs() <= tolerance() {
                    Ordering::Equal
                } else if *v > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    /// Comparison with relative tolerance `τ·max(1, |a|, |b|)` when a float is involved.
    pub fn cmp_tol(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                let scale = 1f64.max(a.abs()).max(b.abs());
                if (a - b).abs() <= tolerance() * scale {
                    Ordering::Equal
                } else if a < b {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn le_tol(&self, other: &Scalar) -> bool {
        self.cmp_tol(other) != Ordering::Greater
    }

    /// `self ≤ other`, allowing an absolute float slack of `τ·scale`.
    pub fn le_within(&self, other: &Scalar, scale: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a <= b,
            _ => self.to_f64() <= other.to_f64() + tolerance() * scale,
        }
    }

    pub fn lt_tol(&self, other: &Scalar) -> bool {
        self.cmp_tol(other) == Ordering::Less
    }

    pub fn eq_tol(&self, other: &Scalar) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn floor(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.floor()),
            Scalar::Float(v) => Scalar::Float(v.floor()),
        }
    }

    pub fn ceil(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.ceil()),
            Scalar::Float(v) => Scalar::Float(v.ceil()),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_integer(),
            Scalar::Float(v) => v.fract() == 0.0,
        }
    }

    /// Integer value as an index, for nonnegative integral scalars.
    pub fn to_index(&self) -> Option<usize> {
        if !self.is_integer() || self.is_negative() {
            return None;
        }
        match self {
            Scalar::Exact(r) => r.to_integer().to_usize(),
            Scalar::Float(v) => (*v >= 0.0 && *v < usize::MAX as f64).then_some(*v as usize),
        }
    }

    pub fn from_index(i: usize) -> Scalar {
        Scalar::from_bigint(BigInt::from(i))
    }

    pub fn powi(&self, n: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(num_traits::pow(r.clone(), n as usize)),
            Scalar::Float(v) => Scalar::Float(v.powi(n as i32)),
        }
    }

    /// Exponent as a positive machine integer, if it is one.
    pub fn as_positive_u32(&self) -> Option<u32> {
        if !self.is_integer() || !self.is_positive() {
            return None;
        }
        match self {
            Scalar::Exact(r) => r.to_integer().to_u32(),
            Scalar::Float(v) => (*v <= u32::MAX as f64).then_some(*v as u32),
        }
    }

    /// `self^q` for `self ≥ 0`. Exact operands with an exact exponent need it to be a positive integer.
    pub fn pow(&self, q: &Scalar) -> Result<Scalar> {
        if let (Scalar::Exact(_), Some(n)) = (q, q.as_positive_u32()) {
            return Ok(self.powi(n));
        }
        match (self, q) {
            (Scalar::Exact(_), Scalar::Exact(_)) => Err(Error::ArithmeticModeMismatch(format!(
                "exponent {q} is not a positive integer"
            ))),
            // A float on either side makes the result a float.
            _ => Ok(Scalar::Float(self.to_f64().powf(q.to_f64()))),
        }
    }

    /// `self^(1/q)` for `self ≥ 0`. Exact when the exact operand is a perfect q-th
    /// power of a rational; otherwise a float. The flag reports whether the result is exact.
    pub fn root(&self, q: &Scalar) -> (Scalar, bool) {
        if let (Scalar::Exact(r), Some(n)) = (self, q.as_positive_u32()) {
            if q.is_exact() && !r.is_negative() {
                let num = r.numer().nth_root(n);
                let den = r.denom().nth_root(n);
                if num.pow(n) == *r.numer() && den.pow(n) == *r.denom() {
                    return (Scalar::Exact(BigRational::new(num, den)), true);
                }
            }
        }
        (Scalar::Float(self.to_f64().powf(1.0 / q.to_f64())), false)
    }

    /// Parses `"3/2"`, `"-4"`, `"1.25"` or `"1e-3"` exactly.
    pub fn parse_exact(s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::Exact(BigRational::new(n, d)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Scalar::from_bigint(n));
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        parse_decimal(s).ok_or_else(bad)
    }

    pub fn parse_float(s: &str) -> Result<Scalar> {
        let exact = Scalar::parse_exact(s)?;
        Ok(exact.to_float())
    }
}

/// Exact value of a decimal literal with optional exponent.
fn parse_decimal(s: &str) -> Option<Scalar> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut num: BigInt = digits.parse().ok()?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(Scalar::Exact(r))
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::float(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

/// Exact values serialize as `"num/den"` strings, floats as numbers.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Float(v) => serializer.serialize_f64(*v),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(v) => Scalar::Float(-v),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                &self $op &rhs
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                &self $op rhs
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self $op &rhs
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}
