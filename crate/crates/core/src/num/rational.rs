//! Exact rational arithmetic.
//!
//! Thin wrapper over `num_rational::BigRational` pinning the conventions the
//! toolkit relies on: always-reduced canonical form (so equality is
//! syntactic and certificate replay is deterministic) and `"p/q"` string
//! serialization in every config and output format.

use num_bigint::{BigInt, Sign};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn new_bigint(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer, denom))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil_int(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn fract(&self) -> Self {
        Rational(&self.0 - BigRational::from_integer(self.0.floor().to_integer()))
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn pow(&self, exp: i32) -> Result<Self> {
        if self.is_zero() && exp < 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.pow(exp)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // fall back through a dyadic approximation for huge components
            crate::num::dyadic::Dyadic::from_rational(self, 64, crate::num::dyadic::Round::Floor)
                .to_f64()
        })
    }

    /// Exact sign-aware comparison against another rational.
    pub fn cmp_rat(&self, other: &Rational) -> Ordering {
        self.0.cmp(&other.0)
    }

    /// Parse "p/q", an integer, or a finite decimal like "0.45".
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Invalid("empty rational".into()));
        }
        if let Some((num, den)) = s.split_once('/') {
            let n = BigInt::from_str(num.trim())
                .map_err(|e| Error::Invalid(format!("bad numerator {num:?}: {e}")))?;
            let d = BigInt::from_str(den.trim())
                .map_err(|e| Error::Invalid(format!("bad denominator {den:?}: {e}")))?;
            if d.is_zero() {
                return Err(Error::Invalid(format!("zero denominator in {s:?}")));
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let neg = int_part.trim_start().starts_with('-');
            let int_val = if int_part.is_empty() || int_part == "-" {
                BigInt::zero()
            } else {
                BigInt::from_str(int_part)
                    .map_err(|e| Error::Invalid(format!("bad decimal {s:?}: {e}")))?
            };
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Invalid(format!("bad decimal {s:?}")));
            }
            let frac_val = BigInt::from_str(frac_part)
                .map_err(|e| Error::Invalid(format!("bad decimal {s:?}: {e}")))?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            let magnitude =
                BigRational::from_integer(int_val.abs()) + BigRational::new(frac_val, scale);
            let signed = if neg { -magnitude } else { magnitude };
            return Ok(Rational(signed));
        }
        let n = BigInt::from_str(s).map_err(|e| Error::Invalid(format!("bad rational {s:?}: {e}")))?;
        Ok(Rational(BigRational::from_integer(n)))
    }

    /// Canonical "p/q" (integers render bare).
    pub fn to_string_canonical(&self) -> String {
        if self.0.denom().is_one() {
            self.0.numer().to_string()
        } else {
            format!("{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_canonical())
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);

impl num_traits::Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl num_traits::One for Rational {
    fn one() -> Self {
        Rational::one()
    }
    fn is_one(&self) -> bool {
        Rational::is_one(self)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string_canonical())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rational::parse(&s).map_err(de::Error::custom)
    }
}

/// Sign of a big integer as -1/0/+1, convenience for exact linear algebra.
pub fn bigint_sign(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
