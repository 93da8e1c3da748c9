//! Scalar abstraction shared by every module.
//!
//! All measure, vector and sphere code is generic over [`Scalar`], which is
//! implemented for `f64`, `f32` and [`BigRational`]. The rational
//! implementation is exact for field operations and integer powers; p-th roots
//! are exact when the argument is a perfect power and otherwise fall back to
//! the nearest double.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Ordered field used for weights, function values and norms.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Converts a finite double. Exact for rationals (dyadic expansion).
    fn from_f64_lossy(x: f64) -> Self;

    fn to_f64_lossy(&self) -> f64;

    /// `self^p` for `self >= 0` and a real exponent `p >= 0`.
    fn powf(&self, p: f64) -> Self;

    /// `self^(1/p)` for `self >= 0` and `p >= 1`.
    fn root(&self, p: f64) -> Self;

    /// Parses a decimal literal such as `0.25`, `-3`, `1e-3`.
    fn parse_decimal(s: &str) -> Option<Self>;

    /// The exact rational value; `None` for non-finite floats.
    fn to_rational(&self) -> Option<BigRational>;

    /// Zero test: exact for exact scalars, `|x| <= tol` otherwise.
    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.to_f64_lossy().abs() <= tol
        }
    }

    /// Equality test with the same convention as [`Scalar::is_negligible`].
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.clone() - other.clone()).is_negligible(tol)
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

fn integer_exponent(p: f64) -> Option<u32> {
    if p >= 0.0 && p.fract() == 0.0 && p <= 64.0 {
        Some(p as u32)
    } else {
        None
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64_lossy(x: f64) -> Self {
        x
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn powf(&self, p: f64) -> Self {
        match integer_exponent(p) {
            Some(n) => self.powi(n as i32),
            None => f64::powf(*self, p),
        }
    }

    fn root(&self, p: f64) -> Self {
        if p == 1.0 {
            *self
        } else if p == 2.0 {
            self.sqrt()
        } else if p == 3.0 {
            self.cbrt()
        } else {
            f64::powf(*self, 1.0 / p)
        }
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok().filter(|x: &f64| x.is_finite())
    }

    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_f64_lossy(x: f64) -> Self {
        x as f32
    }

    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }

    fn powf(&self, p: f64) -> Self {
        match integer_exponent(p) {
            Some(n) => self.powi(n as i32),
            None => f32::powf(*self, p as f32),
        }
    }

    fn root(&self, p: f64) -> Self {
        if p == 1.0 {
            *self
        } else {
            f32::powf(*self, 1.0 / p as f32)
        }
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok().filter(|x: &f32| x.is_finite())
    }

    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
}

fn rational_pow(x: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = x.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

fn exact_root(x: &BigRational, n: u32) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let num = x.numer().nth_root(n);
    let den = x.denom().nth_root(n);
    if num.pow(n) == *x.numer() && den.pow(n) == *x.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_f64_lossy(x: f64) -> Self {
        BigRational::from_float(x).expect("finite double")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn powf(&self, p: f64) -> Self {
        match integer_exponent(p) {
            Some(n) => rational_pow(self, n),
            None => Self::from_f64_lossy(f64::powf(self.to_f64_lossy(), p)),
        }
    }

    fn root(&self, p: f64) -> Self {
        if p == 1.0 || self.is_zero() || self.is_one() {
            return self.clone();
        }
        if let Some(n) = integer_exponent(p) {
            if let Some(r) = exact_root(self, n) {
                return r;
            }
        }
        Self::from_f64_lossy(f64::powf(self.to_f64_lossy(), 1.0 / p))
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        parse_decimal_rational(s)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// Exact decimal parser: `[-+]digits[.digits][(e|E)[-+]digits]`.
pub fn parse_decimal_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str_radix(if all_digits.is_empty() { "0" } else { &all_digits }, 10).ok()?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(num * ten.pow(scale as u32))
    } else {
        BigRational::new(num, ten.pow((-scale) as u32))
    };
    Some(value)
}

/// A measure value in `[0, ∞]`.
///
/// Arithmetic follows the measure-theory conventions `∞ + x = ∞` and
/// `0 · ∞ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Weight<S> {
    pub fn zero() -> Self {
        Weight::Finite(S::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Weight::Finite(x) if x.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Weight::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// Strictly positive (including `∞`).
    pub fn is_positive(&self) -> bool {
        !self.is_zero()
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            Weight::Finite(x) => Some(x),
            Weight::Infinite => None,
        }
    }

    /// Multiplies by a finite nonnegative density, with `0 · ∞ = 0`.
    pub fn scale(&self, g: &S) -> Self {
        match self {
            Weight::Finite(x) => Weight::Finite(x.clone() * g.clone()),
            Weight::Infinite if g.is_zero() => Weight::zero(),
            Weight::Infinite => Weight::Infinite,
        }
    }

    pub fn to_f64_lossy(&self) -> f64 {
        match self {
            Weight::Finite(x) => x.to_f64_lossy(),
            Weight::Infinite => f64::INFINITY,
        }
    }

    pub(crate) fn validate(&self) -> bool {
        match self {
            Weight::Finite(x) => !x.is_negative() && x.to_f64_lossy().is_finite(),
            Weight::Infinite => true,
        }
    }
}

impl<S: Scalar> Add for Weight<S> {
    type Output = Weight<S>;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a + b),
            _ => Weight::Infinite,
        }
    }
}

impl<S: Scalar> Mul<&S> for &Weight<S> {
    type Output = Weight<S>;

    fn mul(self, rhs: &S) -> Weight<S> {
        self.scale(rhs)
    }
}

impl<S: Scalar> PartialOrd for Weight<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Weight::Finite(a), Weight::Finite(b)) => a.partial_cmp(b),
            (Weight::Finite(_), Weight::Infinite) => Some(Ordering::Less),
            (Weight::Infinite, Weight::Finite(_)) => Some(Ordering::Greater),
            (Weight::Infinite, Weight::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl<S: Scalar> fmt::Display for Weight<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(x) => write!(f, "{x}"),
            Weight::Infinite => f.write_str("inf"),
        }
    }
}

impl<S: Scalar> From<S> for Weight<S> {
    fn from(x: S) -> Self {
        Weight::Finite(x)
    }
}

/// Sum of an iterator of weights.
pub fn total<S: Scalar>(ws: impl IntoIterator<Item = Weight<S>>) -> Weight<S> {
    ws.into_iter().fold(Weight::zero(), |a, b| a + b)
}

/// Exponent `p ∈ [1, ∞)` of an `L^p` space.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> crate::Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent(p))
        } else {
            Err(crate::Error::InvalidExponent(p))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shorthand for building rationals in tests and examples.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal_rational("0.1"), Some(ratio(1, 10)));
        assert_eq!(parse_decimal_rational("-2.50"), Some(ratio(-5, 2)));
        assert_eq!(parse_decimal_rational("1e-3"), Some(ratio(1, 1000)));
        assert_eq!(parse_decimal_rational("3E2"), Some(ratio(300, 1)));
        assert_eq!(parse_decimal_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_decimal_rational("abc"), None);
        assert_eq!(parse_decimal_rational(""), None);
    }

    #[test]
    fn rational_roots_exact_when_perfect() {
        assert_eq!(ratio(9, 4).root(2.0), ratio(3, 2));
        assert_eq!(ratio(8, 27).root(3.0), ratio(2, 3));
        let approx = ratio(1, 2).root(2.0);
        assert!((approx.to_f64_lossy() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(ratio(2, 3).powf(3.0), ratio(8, 27));
    }

    #[test]
    fn weight_conventions() {
        let inf: Weight<f64> = Weight::Infinite;
        assert!(inf.scale(&0.0).is_zero());
        assert!((inf.clone() + Weight::Finite(1.0)).is_infinite());
        assert!(Weight::Finite(3.0) < inf);
        assert_eq!(total(vec![Weight::Finite(1.0), Weight::Finite(2.0)]), Weight::Finite(3.0));
    }

    #[test]
    fn exponent_validation() {
        assert!(Exponent::new(1.0).is_ok());
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::INFINITY).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
    }
}
