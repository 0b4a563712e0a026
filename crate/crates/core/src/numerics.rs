//! Exact rational arithmetic and the LCM algebra over positive rationals.
//!
//! Every grid time, representative and scaling coefficient in the solver is a
//! [`Rational`]. Values are always kept in lowest terms with a positive
//! denominator, so equality and hashing are structural.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision fraction in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer/denom`, normalising signs and common factors.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    /// Small-integer constructor for literals. Panics on a zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Exact value of a finite float (every finite `f64` is a dyadic rational).
    pub fn from_f64(value: f64) -> Option<Self> {
        BigRational::from_float(value).map(Rational)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    /// Nearest `f64` (correctly rounded by `num-rational` for in-range values).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact non-negative integer power.
    pub fn pow(&self, exp: u32) -> Self {
        Rational(Pow::pow(&self.0, exp))
    }

    /// Smallest positive rational that both `self` and `other` divide with
    /// an integer quotient.
    ///
    /// For `p/q` and `r/s` in lowest terms this is `lcm(p, r) / gcd(q, s)`.
    pub fn lcm(&self, other: &Rational) -> Result<Rational> {
        if !self.is_positive() || !other.is_positive() {
            return Err(Error::Domain(format!(
                "lcm needs positive operands, got {self} and {other}"
            )));
        }
        let numer = self.numer().lcm(other.numer());
        let denom = self.denom().gcd(other.denom());
        Rational::new(numer, denom)
    }

    /// Fold of [`Rational::lcm`] over a non-empty collection.
    pub fn lcm_of<'a, I>(values: I) -> Result<Rational>
    where
        I: IntoIterator<Item = &'a Rational>,
    {
        let mut iter = values.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::Domain("lcm of an empty set".into()))?;
        if !first.is_positive() {
            return Err(Error::Domain(format!("lcm needs positive operands, got {first}")));
        }
        iter.try_fold(first.clone(), |acc, v| acc.lcm(v))
    }

    /// True when `self / divisor` is an integer.
    pub fn is_multiple_of(&self, divisor: &Rational) -> bool {
        !divisor.is_zero() && (self / divisor).is_integer()
    }
}

/// `rational_lcm` as a free function.
pub fn rational_lcm(a: &Rational, b: &Rational) -> Result<Rational> {
    a.lcm(b)
}

/// `set_lcm` as a free function.
pub fn set_lcm(values: &[Rational]) -> Result<Rational> {
    Rational::lcm_of(values)
}

pub fn rational_power(base: &Rational, exp: u32) -> Rational {
    base.pow(exp)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `p`, `p/q` and plain decimals such as `-0.45`, all converted exactly.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Rational::new(n, d).map_err(|_| bad());
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let digits: String = [int_digits, frac].concat();
            let mut numer: BigInt = if digits.is_empty() {
                return Err(bad());
            } else {
                digits.parse().map_err(|_| bad())?
            };
            if negative {
                numer = -numer;
            }
            let denom = BigInt::from(10u32).pow(frac.len() as u32);
            return Rational::new(numer, denom);
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_integer(v)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer((*other).into())))
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigRational::from_integer((*other).into())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Mul<&BigInt> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &BigInt) -> Rational {
        Rational(&self.0 * BigRational::from_integer(rhs.clone()))
    }
}

impl core::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}
