//! Arithmetic backends.
//!
//! Every enumeration is generic over [`Scalar`]. Two backends ship with the
//! crate: `f64` with Neumaier-compensated accumulation, and [`Exact`]
//! (arbitrary precision rationals) for exact verdicts on small instances.

use alloc::string::{String, ToString};
use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational scalar.
pub type Exact = BigRational;

/// Relative tolerance applied to float-mode inequality verdicts.
pub const FLOAT_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Running sum of terms of one scalar type.
pub trait Accumulator<S>: Clone + Default + Send {
    fn add(&mut self, term: &S);
    /// Folds another accumulator into this one. Order matters for floats.
    fn merge(&mut self, other: &Self);
    fn total(&self) -> S;
    /// Sum of absolute values of all added terms, as a float.
    fn abs_total(&self) -> f64;
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Acc: Accumulator<Self>;

    /// True for backends whose arithmetic is exact.
    const EXACT: bool;

    fn to_f64(&self) -> f64;
    fn abs_value(&self) -> Self;
    fn from_exact(value: &Exact) -> Self;
    /// Lossy for exact backends only when `value` is not finite.
    fn from_f64(value: f64) -> Self;
    /// Human-readable form used in reports (`p/q` for rationals).
    fn to_text(&self) -> String;

    /// `self <= bound` up to the backend tolerance.
    fn le_tol(&self, bound: &Self) -> bool {
        if Self::EXACT {
            self <= bound
        } else {
            let a = self.to_f64();
            let b = bound.to_f64();
            a <= b + FLOAT_RELATIVE_TOLERANCE * a.abs().max(b.abs())
        }
    }

    fn pow_u32(&self, exp: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = out * self.clone();
        }
        out
    }
}

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Accumulator<f64> for CompensatedSum {
    fn add(&mut self, term: &f64) {
        self.push(*term);
    }

    fn merge(&mut self, other: &Self) {
        let abs = self.abs + other.abs;
        self.push(other.sum);
        self.push(other.compensation);
        self.abs = abs;
    }

    fn total(&self) -> f64 {
        self.value()
    }

    fn abs_total(&self) -> f64 {
        self.abs
    }
}

/// Compensated sum of an iterator of floats.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.push(t);
    }
    acc.value()
}

impl Scalar for f64 {
    type Acc = CompensatedSum;
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn from_exact(value: &Exact) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }

    fn from_f64(value: f64) -> Self {
        value
    }

    fn to_text(&self) -> String {
        self.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct ExactSum {
    sum: Exact,
    abs: Exact,
}

impl Default for ExactSum {
    fn default() -> Self {
        Self {
            sum: Exact::zero(),
            abs: Exact::zero(),
        }
    }
}

impl Accumulator<Exact> for ExactSum {
    fn add(&mut self, term: &Exact) {
        self.sum += term;
        self.abs += term.abs();
    }

    fn merge(&mut self, other: &Self) {
        self.sum += &other.sum;
        self.abs += &other.abs;
    }

    fn total(&self) -> Exact {
        self.sum.clone()
    }

    fn abs_total(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs).unwrap_or(f64::INFINITY)
    }
}

impl Scalar for Exact {
    type Acc = ExactSum;
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn from_exact(value: &Exact) -> Self {
        value.clone()
    }

    fn from_f64(value: f64) -> Self {
        BigRational::from_float(value).unwrap_or_else(Exact::zero)
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            alloc::format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Parses `"0.25"`, `"-1.5e-3"`, `"3"` or `"1/3"` into an exact rational.
pub fn parse_exact(text: &str) -> Result<Exact, Error> {
    let bad = || Error::InvalidNumber(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Exact::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut all = String::with_capacity(int_part.len() + frac_part.len());
    all.push_str(int_part);
    all.push_str(frac_part);
    let mut numer: BigInt = all.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Exact::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Exact::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Exact rational equal to the shortest decimal representation of `value`.
///
/// `0.02_f64` becomes `1/50`, not the nearest binary fraction.
pub fn exact_from_decimal_f64(value: f64) -> Result<Exact, Error> {
    if !value.is_finite() {
        return Err(Error::InvalidNumber(value.to_string()));
    }
    parse_exact(&alloc::format!("{:e}", value))
}

/// Decimal string when the rational terminates in base ten, `p/q` otherwise.
pub fn exact_to_decimal(value: &Exact) -> String {
    let mut den = value.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return value.to_text();
    }
    let places = twos.max(fives);
    let scaled = value * Exact::from_integer(num_traits::pow(BigInt::from(10u32), places));
    let digits = scaled.to_integer();
    if places == 0 {
        return digits.to_string();
    }
    let negative = digits.is_negative();
    let mut text = digits.abs().to_string();
    while text.len() <= places {
        text.insert(0, '0');
    }
    text.insert(text.len() - places, '.');
    if negative {
        text.insert(0, '-');
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Exact {
        Exact::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_exact("0.02").unwrap(), q(1, 50));
        assert_eq!(parse_exact("-1.5e-3").unwrap(), q(-3, 2000));
        assert_eq!(parse_exact("3").unwrap(), q(3, 1));
        assert_eq!(parse_exact("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_exact(".5").unwrap(), q(1, 2));
        assert_eq!(parse_exact("2E2").unwrap(), q(200, 1));
        assert!(parse_exact("abc").is_err());
        assert!(parse_exact("1/0").is_err());
        assert!(parse_exact("").is_err());
        assert!(parse_exact("1.2.3").is_err());
    }

    #[test]
    fn decimal_round_trip() {
        assert_eq!(exact_to_decimal(&q(1, 4)), "0.25");
        assert_eq!(exact_to_decimal(&q(-3, 2000)), "-0.0015");
        assert_eq!(exact_to_decimal(&q(7, 1)), "7");
        assert_eq!(exact_to_decimal(&q(1, 3)), "1/3");
        assert_eq!(exact_from_decimal_f64(0.02).unwrap(), q(1, 50));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let terms = [1.0, 1e-16, 1e-16, -1.0];
        let naive: f64 = terms.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(compensated_sum(terms), 2e-16);
    }

    #[test]
    fn float_tolerance_is_relative() {
        assert!(1.0f64.le_tol(&1.0));
        assert!((1.0 + 1e-13f64).le_tol(&1.0));
        assert!(!(1.0 + 1e-10f64).le_tol(&1.0));
        assert!(!q(1_000_000_000_001, 1_000_000_000_000).le_tol(&q(1, 1)));
    }

    proptest::proptest! {
        #[test]
        fn decimal_text_round_trips(n in -1_000_000i64..1_000_000, k in 0u32..8) {
            let value = q(n, 10i64.pow(k));
            let text = exact_to_decimal(&value);
            proptest::prop_assert_eq!(parse_exact(&text).unwrap(), value);
        }
    }
}
