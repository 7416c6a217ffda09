//! Arbitrary-precision dyadic floating point with explicit directed rounding.
//!
//! A [`Dyadic`] is an exact value `mantissa * 2^exponent` with a `BigInt`
//! mantissa kept odd (or zero). Exact addition and multiplication never
//! round; explicit [`Dyadic::round`] and [`Dyadic::div_round`] round toward
//! `-inf` or `+inf` at a requested significand width. All enclosure
//! arithmetic is built on these primitives, so every rounding step in the
//! toolkit is visible in this one module.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::num::rational::Rational;

/// Rounding direction for a directed-rounding step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Floor,
    /// Toward positive infinity.
    Ceil,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Floor => Round::Ceil,
            Round::Ceil => Round::Floor,
        }
    }
}

/// Exact dyadic rational `mantissa * 2^exponent`.
///
/// Invariant: `mantissa` is odd or zero; zero is stored as `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

/// Addition aligns exponents by shifting; beyond this many bits the smaller
/// operand is folded in as a directed nudge instead of an exact shift.
const MAX_ALIGN_BITS: i64 = 1 << 16;

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigInt::from(n), 0)
    }

    /// Build from mantissa and exponent, normalizing so the mantissa is odd.
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Dyadic::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0) as i64;
        if tz > 0 {
            Dyadic { mantissa: mantissa >> tz as usize, exponent: exponent + tz }
        } else {
            Dyadic { mantissa, exponent }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.sign() == Sign::Minus
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.sign() == Sign::Plus
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Number of significant bits of the mantissa (0 for zero).
    pub fn sig_bits(&self) -> u64 {
        self.mantissa.magnitude().bits()
    }

    /// `2^e` as a dyadic.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: e }
    }

    /// Exact conversion to a rational number.
    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_bigint(&self.mantissa << self.exponent as usize)
        } else {
            Rational::new_bigint(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as usize,
            )
        }
    }

    /// Nearest-f64 approximation (not rigorous; reporting only).
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.sig_bits() as i64;
        // keep at most 53 bits before converting
        let drop = (bits - 53).max(0);
        let m: BigInt = &self.mantissa >> drop as usize;
        let m_f64 = m.to_f64().unwrap_or(f64::NAN);
        m_f64 * 2f64.powi((self.exponent + drop).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    pub fn neg(&self) -> Self {
        Dyadic { mantissa: -self.mantissa.clone(), exponent: self.exponent }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Exact sum. Falls back to a directed nudge when the exponent gap is
    /// astronomically large; `dir` decides the nudge direction in that case.
    pub fn add_dir(&self, other: &Dyadic, dir: Round) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (big, small) = if self.exponent >= other.exponent { (self, other) } else { (other, self) };
        let gap = big.exponent - small.exponent;
        if gap > MAX_ALIGN_BITS + small.sig_bits() as i64 {
            // The small operand cannot affect any retained bit; fold it in as
            // a one-ulp directed nudge at the small operand's scale.
            let nudge = match dir {
                Round::Floor => {
                    if small.is_negative() {
                        -BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                }
                Round::Ceil => {
                    if small.is_positive() {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                }
            };
            let shifted: BigInt = (&big.mantissa << MAX_ALIGN_BITS as usize) + nudge;
            return Dyadic::new(shifted, big.exponent - MAX_ALIGN_BITS);
        }
        let aligned: BigInt = (&big.mantissa << gap as usize) + &small.mantissa;
        Dyadic::new(aligned, small.exponent)
    }

    /// Exact sum. For exponent gaps beyond the alignment bound the result is
    /// rounded toward negative infinity; endpoint arithmetic must use
    /// `add_dir` with the direction of the endpoint being computed.
    pub fn add(&self, other: &Dyadic) -> Dyadic {
        self.add_dir(other, Round::Floor)
    }

    pub fn sub_dir(&self, other: &Dyadic, dir: Round) -> Dyadic {
        self.add_dir(&other.neg(), dir)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    /// Exact product.
    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::new(&self.mantissa * &other.mantissa, self.exponent + other.exponent)
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.sig_bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let drop = (bits - prec as u64) as usize;
        let q = floor_shr(&self.mantissa, drop);
        let m = match dir {
            Round::Floor => q,
            Round::Ceil => {
                let back: BigInt = &q << drop;
                if back == self.mantissa {
                    q
                } else {
                    q + 1
                }
            }
        };
        Dyadic::new(m, self.exponent + drop as i64)
    }

    /// Directed-rounding quotient at `prec` significant bits.
    pub fn div_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Option<Dyadic> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Dyadic::zero());
        }
        // Scale the numerator so the integer quotient has ≥ prec+1 bits, then
        // direct-round the remainder.
        let nbits = self.sig_bits() as i64;
        let dbits = other.sig_bits() as i64;
        let shift = (prec as i64 + 2 + dbits - nbits).max(0) as usize;
        let num: BigInt = &self.mantissa << shift;
        let (q, r) = num.div_rem(&other.mantissa);
        // div_rem truncates toward zero; fix to floor/ceil of the true quotient
        let exact = r.is_zero();
        let true_sign_negative = self.is_negative() != other.is_negative();
        let q_adj = match (dir, exact, true_sign_negative) {
            (_, true, _) => q,
            (Round::Floor, false, true) => q - 1,
            (Round::Floor, false, false) => q,
            (Round::Ceil, false, false) => q + 1,
            (Round::Ceil, false, true) => q,
        };
        let raw = Dyadic::new(q_adj, self.exponent - other.exponent - shift as i64);
        Some(raw.round(prec, dir))
    }

    /// Directed rounding of a rational to `prec` bits.
    pub fn from_rational(q: &Rational, prec: u32, dir: Round) -> Dyadic {
        let num = Dyadic::new(q.numer().clone(), 0);
        let den = Dyadic::new(q.denom().clone(), 0);
        num.div_round(&den, prec, dir).expect("denominator is positive")
    }

    /// Exact conversion when the rational is dyadic, else None.
    pub fn from_rational_exact(q: &Rational) -> Option<Dyadic> {
        let den = q.denom();
        if den.is_one() {
            return Some(Dyadic::new(q.numer().clone(), 0));
        }
        let mag = den.magnitude();
        let bits = mag.bits();
        // power of two <=> exactly one set bit
        if mag.count_ones() == 1 {
            Some(Dyadic::new(q.numer().clone(), -((bits - 1) as i64)))
        } else {
            None
        }
    }

    /// One unit in the last place relative to this value's magnitude at the
    /// given precision: `2^(exp_of_msb - prec + 1)`.
    pub fn ulp(&self, prec: u32) -> Dyadic {
        if self.is_zero() {
            return Dyadic::pow2(-(prec as i64));
        }
        let msb = self.exponent + self.sig_bits() as i64 - 1;
        Dyadic::pow2(msb - prec as i64 + 1)
    }

    pub fn cmp_exact(&self, other: &Dyadic) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => {
                return if other.is_positive() { Ordering::Less } else { Ordering::Greater }
            }
            (false, true) => {
                return if self.is_positive() { Ordering::Greater } else { Ordering::Less }
            }
            _ => {}
        }
        match (self.is_negative(), other.is_negative()) {
            (false, true) => return Ordering::Greater,
            (true, false) => return Ordering::Less,
            _ => {}
        }
        // same sign: compare by magnitude-and-exponent without allocating when
        // widths differ wildly
        let self_msb = self.exponent + self.sig_bits() as i64;
        let other_msb = other.exponent + other.sig_bits() as i64;
        if self_msb != other_msb {
            let mag_cmp = self_msb.cmp(&other_msb);
            return if self.is_negative() { mag_cmp.reverse() } else { mag_cmp };
        }
        let gap = self.exponent - other.exponent;
        if gap >= 0 {
            (&self.mantissa << gap as usize).cmp(&other.mantissa)
        } else {
            self.mantissa.cmp(&(&other.mantissa << (-gap) as usize))
        }
    }

    /// Exact decimal string. Dyadics always have a finite decimal expansion.
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if self.exponent >= 0 {
            let v: BigInt = &self.mantissa << self.exponent as usize;
            return v.to_string();
        }
        let k = (-self.exponent) as usize;
        // mantissa / 2^k = mantissa * 5^k / 10^k
        let five_k = BigInt::from(5u32).pow(k as u32);
        let scaled = (&self.mantissa * five_k).abs();
        let digits = scaled.to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        if digits.len() > k {
            let (int_part, frac_part) = digits.split_at(digits.len() - k);
            format!("{sign}{int_part}.{frac_part}")
        } else {
            let zeros = "0".repeat(k - digits.len());
            format!("{sign}0.{zeros}{digits}")
        }
    }

    /// Parse a decimal string ("-3.25", "7") into an exact rational, then
    /// require it to be dyadic.
    pub fn parse_decimal(s: &str) -> Option<Dyadic> {
        let q = Rational::parse(s).ok()?;
        Dyadic::from_rational_exact(&q)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

/// Floor division by `2^k` (shift right rounding toward negative infinity).
fn floor_shr(m: &BigInt, k: usize) -> BigInt {
    // num-bigint's Shr on BigInt rounds toward negative infinity already.
    m >> k
}
