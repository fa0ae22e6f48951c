//! Scalar abstractions.
//!
//! Numerical code is written against [`Real`] (implemented for `f32` and
//! `f64`). Threshold arithmetic, where floors and ceilings of `mu` decide
//! lattice membership, is written against [`ExactScalar`], which is also
//! implemented for `Rational64` so that borderline cases can be decided
//! without rounding.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive, Zero};

/// Floating point scalar used by all numerical routines.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static + QuadValue<Self> + serde::Serialize + serde::de::DeserializeOwned
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in target float")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::c(0.5)
    }

    #[inline]
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable in target float")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Values a quadrature rule can accumulate: real or complex.
pub trait QuadValue<F: Real>:
    Copy + Zero + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<F, Output = Self> + Send + Sync
{
    fn magnitude(&self) -> F;

    fn all_finite(&self) -> bool;
}

impl<F: Real> QuadValue<F> for Complex<F> {
    #[inline]
    fn magnitude(&self) -> F {
        self.norm()
    }

    #[inline]
    fn all_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

macro_rules! quad_value_impls {
    ($($t:ty),*) => {$(
        impl QuadValue<$t> for $t {
            #[inline]
            fn magnitude(&self) -> $t {
                self.abs()
            }

            #[inline]
            fn all_finite(&self) -> bool {
                self.is_finite()
            }
        }
    )*};
}

quad_value_impls!(f32, f64);

/// Ordered field with floor and ceiling, used for threshold formulas.
pub trait ExactScalar: Clone + PartialOrd + Num + Debug + Display + Send + Sync {
    fn floor_exact(&self) -> Self;

    fn ceil_exact(&self) -> Self;

    fn from_integer(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn one_half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl ExactScalar for f64 {
    fn floor_exact(&self) -> Self {
        f64::floor(*self)
    }

    fn ceil_exact(&self) -> Self {
        f64::ceil(*self)
    }

    fn from_integer(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl ExactScalar for f32 {
    fn floor_exact(&self) -> Self {
        f32::floor(*self)
    }

    fn ceil_exact(&self) -> Self {
        f32::ceil(*self)
    }

    fn from_integer(v: i64) -> Self {
        v as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl ExactScalar for Rational64 {
    fn floor_exact(&self) -> Self {
        Rational64::floor(self)
    }

    fn ceil_exact(&self) -> Self {
        Rational64::ceil(self)
    }

    fn from_integer(v: i64) -> Self {
        Rational64::from_integer(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Parses a decimal literal such as `0.3`, `-2`, `4.25e-1` or `30/7` into an
/// exact rational.
pub fn parse_rational(text: &str) -> Option<Rational64> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational64::new(n, d));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: i64 = if all_digits.is_empty() { 0 } else { all_digits.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let mut denom: i64 = 1;
    if scale >= 0 {
        numer = numer.checked_mul(10i64.checked_pow(scale as u32)?)?;
    } else {
        denom = 10i64.checked_pow((-scale) as u32)?;
    }
    if negative {
        numer = -numer;
    }
    Some(Rational64::new(numer, denom))
}
