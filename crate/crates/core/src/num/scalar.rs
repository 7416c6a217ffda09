//! The scalar abstraction shared by exact-rational and enclosure lanes.
//!
//! Map coefficients, hull endpoints and witness points are generic over a
//! [`Scalar`]: exact [`Rational`] values when the defining data is rational,
//! rigorous [`Enclosure`] values otherwise. Comparisons come in "certainly"
//! form: they return true only when the claim holds for every represented
//! value, so a `false` from an enclosure comparison means "not decidable at
//! this width", never "false".

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::Result;
use crate::num::enclosure::{default_precision, Enclosure};
use crate::num::rational::Rational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + 'static
{
    /// Embed an exact rational (exact for `Rational`, outward-rounded point
    /// enclosure for `Enclosure`).
    fn from_rational(q: &Rational) -> Self;

    /// Rigorous lower bound as an exact rational.
    fn rational_lower(&self) -> Rational;

    /// Rigorous upper bound as an exact rational.
    fn rational_upper(&self) -> Rational;

    /// Exact value, when one is represented (always for `Rational`,
    /// zero-width intervals for `Enclosure`).
    fn as_exact_rational(&self) -> Option<Rational>;

    /// Promote to an enclosure at the given precision.
    fn to_enclosure(&self, prec: u32) -> Enclosure;

    /// Division; errors when the divisor may be zero.
    fn try_div(&self, other: &Self) -> Result<Self>;

    /// `self < other` for every represented pair.
    fn certainly_lt(&self, other: &Self) -> bool {
        self.rational_upper() < other.rational_lower()
    }

    /// `self <= other` for every represented pair.
    fn certainly_le(&self, other: &Self) -> bool {
        self.rational_upper() <= other.rational_lower()
    }

    fn certainly_positive(&self) -> bool {
        self.rational_lower() > Rational::zero()
    }

    fn certainly_negative(&self) -> bool {
        self.rational_upper() < Rational::zero()
    }

    /// A value certainly distinct from zero (needed for map invertibility).
    fn certainly_nonzero(&self) -> bool {
        self.certainly_positive() || self.certainly_negative()
    }

    fn abs(&self) -> Self;

    fn to_f64(&self) -> f64 {
        0.5 * (self.rational_lower().to_f64() + self.rational_upper().to_f64())
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn rational_lower(&self) -> Rational {
        self.clone()
    }

    fn rational_upper(&self) -> Rational {
        self.clone()
    }

    fn as_exact_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn to_enclosure(&self, prec: u32) -> Enclosure {
        Enclosure::from_rational(self, prec)
    }

    fn try_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            Err(crate::error::Error::DivisionByZero)
        } else {
            Ok(self / other)
        }
    }

    fn abs(&self) -> Self {
        Rational::abs(self)
    }
}

impl Scalar for Enclosure {
    fn from_rational(q: &Rational) -> Self {
        Enclosure::from_rational(q, default_precision())
    }

    fn rational_lower(&self) -> Rational {
        self.lo_rational()
    }

    fn rational_upper(&self) -> Rational {
        self.hi_rational()
    }

    fn as_exact_rational(&self) -> Option<Rational> {
        self.as_point_rational()
    }

    fn to_enclosure(&self, _prec: u32) -> Enclosure {
        self.clone()
    }

    fn try_div(&self, other: &Self) -> Result<Self> {
        self.div(other)
    }

    fn abs(&self) -> Self {
        Enclosure::abs(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_fixed_point<S: Scalar>(ratio: S, translation: S) -> S {
        // t / (1 - r)
        let denom = S::one() - &ratio;
        translation.try_div(&denom).unwrap()
    }

    #[test]
    fn fixed_point_same_in_both_lanes() {
        let exact = generic_fixed_point(Rational::new(1, 4), Rational::new(3, 8));
        assert_eq!(exact, Rational::new(1, 2));

        let enc = generic_fixed_point(
            Enclosure::from_rational(&Rational::new(1, 4), 64),
            Enclosure::from_rational(&Rational::new(3, 8), 64),
        );
        assert!(enc.contains_rational(&Rational::new(1, 2)));
    }

    #[test]
    fn certainly_comparisons_are_conservative() {
        let a = Enclosure::from_rational_interval(&Rational::new(1, 3), &Rational::new(1, 2), 64)
            .unwrap();
        let b = Enclosure::from_rational_interval(&Rational::new(2, 5), &Rational::new(3, 5), 64)
            .unwrap();
        // overlapping: neither strictly below the other
        assert!(!a.certainly_lt(&b));
        assert!(!b.certainly_lt(&a));
        let c = Enclosure::from_rational(&Rational::new(7, 10), 64);
        assert!(a.certainly_lt(&c));
    }
}
