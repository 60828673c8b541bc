//! Exact arithmetic in `Q`, `Q(sqrt 3)` and `Q(sqrt 5)`.
//!
//! [`QuadExt`] holds `a + b*sqrt(m)` with arbitrary-precision rational `a`,
//! `b` and `m` in `{1, 3, 5}`. These three fields are all the certificate
//! coefficients ever need: cosines of multiples of `2*pi/12` live in
//! `Q(sqrt 3)`, those of `2*pi/10` in `Q(sqrt 5)`, and every other
//! coefficient is rational.
//!
//! Values are normalized so that `b == 0` exactly when `m == 1`; a purely
//! rational value combines with either radical. Combining `sqrt 3` with
//! `sqrt 5` is an error: the checked `try_*` methods report it, and the
//! operator impls panic on it.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Shorthand for the rational `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for the integer `n` as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn rational_to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// An element `a + b*sqrt(m)` of `Q(sqrt m)`, `m` in `{1, 3, 5}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
    m: u32,
}

impl QuadExt {
    /// Radicands supported by this type.
    pub const RADICANDS: [u32; 3] = [1, 3, 5];

    /// Builds `a + b*sqrt(m)`; rejects unsupported `m`.
    pub fn new(a: Rational, b: Rational, m: u32) -> Result<Self> {
        if !Self::RADICANDS.contains(&m) {
            return Err(Error::UnsupportedRadicand(m));
        }
        Ok(Self::normalized(a, b, m))
    }

    fn normalized(a: Rational, b: Rational, m: u32) -> Self {
        if m == 1 {
            QuadExt {
                a: a + b,
                b: Rational::zero(),
                m: 1,
            }
        } else if b.is_zero() {
            QuadExt { a, b, m: 1 }
        } else {
            QuadExt { a, b, m }
        }
    }

    /// The rational number `r`.
    pub fn rational(r: Rational) -> Self {
        QuadExt {
            a: r,
            b: Rational::zero(),
            m: 1,
        }
    }

    /// The integer `n`.
    pub fn int(n: i64) -> Self {
        Self::rational(rat(n))
    }

    /// `num / den`.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::rational(ratio(num, den))
    }

    /// `sqrt(m)`.
    pub fn sqrt(m: u32) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), m)
    }

    /// Zero.
    pub fn zero() -> Self {
        Self::int(0)
    }

    /// One.
    pub fn one() -> Self {
        Self::int(1)
    }

    /// Rational part `a`.
    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// Coefficient `b` of the radical.
    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// Radicand (1 for rationals).
    pub fn m(&self) -> u32 {
        self.m
    }

    /// True iff the value is zero.
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// True iff `b == 0`.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The value as a rational, if it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.a.clone())
    }

    fn common_radicand(&self, other: &Self) -> Result<u32> {
        match (self.m, other.m) {
            (1, m) | (m, 1) => Ok(m),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(Error::MixedRadicals(x, y)),
        }
    }

    /// Exact sum.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let m = self.common_radicand(other)?;
        Ok(Self::normalized(&self.a + &other.a, &self.b + &other.b, m))
    }

    /// Exact difference.
    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let m = self.common_radicand(other)?;
        Ok(Self::normalized(&self.a - &other.a, &self.b - &other.b, m))
    }

    /// Exact product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let m = self.common_radicand(other)?;
        let mm = rat(m as i64);
        let a = &self.a * &other.a + &self.b * &other.b * mm;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::normalized(a, b, m))
    }

    /// Exact quotient; fails on a zero divisor.
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        let inv = other.inverse()?;
        self.try_mul(&inv)
    }

    /// Multiplicative inverse: `(a - b sqrt m) / (a^2 - m b^2)`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let norm = self.norm();
        Ok(Self::normalized(&self.a / &norm, -&self.b / &norm, self.m))
    }

    /// Field norm `a^2 - m b^2` (non-zero for non-zero values, as `m` is not a square).
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * rat(self.m as i64)
    }

    /// Conjugate `a - b*sqrt(m)`.
    pub fn conj(&self) -> Self {
        Self::normalized(self.a.clone(), -self.b.clone(), self.m)
    }

    /// Multiplication by a rational scalar.
    pub fn scale(&self, r: &Rational) -> Self {
        Self::normalized(&self.a * r, &self.b * r, self.m)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with m b^2 (never equal, m is not a square)
        match (&self.a * &self.a).cmp(&(&self.b * &self.b * rat(self.m as i64))) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Exact comparison; fails only on mixed radicals.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        Ok(self.try_sub(other)?.signum().cmp(&0))
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * (self.m as f64).sqrt()
    }
}

fn sign_of(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt::rational(r)
    }
}

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        QuadExt::int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadExt> for &QuadExt {
            type Output = QuadExt;
            /// Panics if the operands live in different quadratic fields.
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            a: -self.a,
            b: -self.b,
            m: self.m,
        }
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -(self.clone())
    }
}

impl fmt::Display for QuadExt {
    /// `a` for rationals, otherwise `a + b*sqrt(m)` with reduced fractions.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.m)
        }
    }
}

impl FromStr for QuadExt {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse {s:?} as a + b*sqrt(m)"));
        let parse_q = |t: &str| t.trim().parse::<Rational>().map_err(|_| bad());
        match s.split_once(" + ") {
            None => Ok(QuadExt::rational(parse_q(s)?)),
            Some((a, rest)) => {
                let (b, m) = rest.split_once("*sqrt(").ok_or_else(bad)?;
                let m = m.strip_suffix(')').ok_or_else(bad)?;
                let m: u32 = m.trim().parse().map_err(|_| bad())?;
                QuadExt::new(parse_q(a)?, parse_q(b)?, m)
            }
        }
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Exact value of `cos(2*pi*j/q)` when it lies in `Q`, `Q(sqrt 3)` or
/// `Q(sqrt 5)`.
///
/// After reducing `j/q` to lowest terms the denominator must be one of
/// 1, 2, 3, 4, 5, 6, 10, 12; anything else (e.g. `q = 8` or `q = 16`) is an
/// error, never a floating-point fallback.
///
/// ```
/// use apdensity_core::qfield::{exact_cos, QuadExt};
/// assert_eq!(exact_cos(1, 12).unwrap().to_string(), "0 + 1/2*sqrt(3)");
/// assert_eq!(exact_cos(2, 10).unwrap().to_string(), "-1/4 + 1/4*sqrt(5)");
/// assert!(exact_cos(1, 8).is_err());
/// ```
pub fn exact_cos(j: i64, q: i64) -> Result<QuadExt> {
    if q <= 0 {
        return Err(Error::UnsupportedCosine { j, q });
    }
    let r = j.rem_euclid(q);
    let g = r.gcd(&q);
    let (num, den) = (r / g, q / g);
    let q3 = |a: i64, b: i64, d: i64| QuadExt::new(ratio(a, d), ratio(b, d), 3);
    let q5 = |a: i64, b: i64, d: i64| QuadExt::new(ratio(a, d), ratio(b, d), 5);
    match (den, num) {
        (1, _) => Ok(QuadExt::int(1)),
        (2, _) => Ok(QuadExt::int(-1)),
        (4, _) => Ok(QuadExt::int(0)),
        (3, _) => Ok(QuadExt::frac(-1, 2)),
        (6, _) => Ok(QuadExt::frac(1, 2)),
        (12, 1) | (12, 11) => q3(0, 1, 2),
        (12, 5) | (12, 7) => q3(0, -1, 2),
        (5, 1) | (5, 4) => q5(-1, 1, 4),
        (5, 2) | (5, 3) => q5(-1, -1, 4),
        (10, 1) | (10, 9) => q5(1, 1, 4),
        (10, 3) | (10, 7) => q5(1, -1, 4),
        _ => Err(Error::UnsupportedCosine { j, q }),
    }
}
