//! Directed-rounding interval arithmetic over dyadic endpoints.
//!
//! An [`Enclosure`] is a closed interval `[lo, hi]` whose endpoints are
//! exact dyadic floats. Every operation rounds `lo` toward `-inf` and `hi`
//! toward `+inf` at the enclosure's working precision, so the result always
//! contains the exact image of its operand sets. Widths stay auditable:
//! add/mul/div cost at most a couple of ulps per step, and operations on
//! exactly representable dyadic data are exact.
//!
//! The working precision is carried per value (binary significand bits,
//! default 64, overridable via the `SELFSIM_PRECISION` environment variable
//! or [`set_default_precision`]). Binary operations compute at the larger of
//! the two operand precisions.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::num::dyadic::{Dyadic, Round};
use crate::num::rational::Rational;

static DEFAULT_PRECISION: AtomicU32 = AtomicU32::new(0);

/// Working significand width in bits used when no explicit precision is given.
pub fn default_precision() -> u32 {
    let v = DEFAULT_PRECISION.load(AtomicOrdering::Relaxed);
    if v != 0 {
        return v;
    }
    let initial = std::env::var("SELFSIM_PRECISION")
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .filter(|&p| (8..=65536).contains(&p))
        .unwrap_or(64);
    // benign race: every thread computes the same value
    DEFAULT_PRECISION.store(initial, AtomicOrdering::Relaxed);
    initial
}

/// Override the default enclosure precision for this process.
pub fn set_default_precision(prec: u32) {
    assert!((8..=65536).contains(&prec), "precision out of range");
    DEFAULT_PRECISION.store(prec, AtomicOrdering::Relaxed);
}

/// Closed interval with outward rounding on every operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Enclosure {
    /// Exact point enclosure of a dyadic value.
    pub fn point(d: Dyadic, prec: u32) -> Self {
        Enclosure { lo: d.clone(), hi: d, prec }
    }

    pub fn from_endpoints(lo: Dyadic, hi: Dyadic, prec: u32) -> Result<Self> {
        if lo.cmp_exact(&hi) == Ordering::Greater {
            return Err(Error::Invalid("enclosure endpoints out of order".into()));
        }
        Ok(Enclosure { lo, hi, prec })
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Enclosure::point(Dyadic::from_int(n), prec)
    }

    /// Outward-rounded enclosure of a rational; exact (zero width) when the
    /// rational is dyadic and fits the precision.
    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        if let Some(d) = Dyadic::from_rational_exact(q) {
            if d.sig_bits() <= prec as u64 {
                return Enclosure::point(d, prec);
            }
        }
        Enclosure {
            lo: Dyadic::from_rational(q, prec, Round::Floor),
            hi: Dyadic::from_rational(q, prec, Round::Ceil),
            prec,
        }
    }

    /// Enclosure of a whole rational interval.
    pub fn from_rational_interval(lo: &Rational, hi: &Rational, prec: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Invalid("interval endpoints out of order".into()));
        }
        Ok(Enclosure {
            lo: Dyadic::from_rational(lo, prec, Round::Floor),
            hi: Dyadic::from_rational(hi, prec, Round::Ceil),
            prec,
        })
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Same interval re-tagged to a new working precision (endpoints are kept
    /// exact; subsequent operations round at the new width).
    pub fn with_prec(&self, prec: u32) -> Self {
        Enclosure { lo: self.lo.clone(), hi: self.hi.clone(), prec }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Exact rational value when the enclosure has zero width.
    pub fn as_point_rational(&self) -> Option<Rational> {
        if self.is_point() {
            Some(self.lo.to_rational())
        } else {
            None
        }
    }

    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational()
    }

    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational()
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo.to_rational() <= *q && *q <= self.hi.to_rational()
    }

    pub fn contains(&self, other: &Enclosure) -> bool {
        self.lo.cmp_exact(&other.lo) != Ordering::Greater
            && self.hi.cmp_exact(&other.hi) != Ordering::Less
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn certainly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// `self < other` for every pair of points in the two intervals.
    pub fn certainly_lt(&self, other: &Enclosure) -> bool {
        self.hi.cmp_exact(&other.lo) == Ordering::Less
    }

    pub fn certainly_le(&self, other: &Enclosure) -> bool {
        self.hi.cmp_exact(&other.lo) != Ordering::Greater
    }

    /// The two intervals share no point.
    pub fn disjoint(&self, other: &Enclosure) -> bool {
        self.certainly_lt(other) || other.certainly_lt(self)
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }

    pub fn abs(&self) -> Enclosure {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = self.lo.neg().max(self.hi.clone());
            Enclosure { lo: Dyadic::zero(), hi: m, prec: self.prec }
        }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        let prec = self.prec.max(other.prec);
        Enclosure {
            lo: self.lo.add_dir(&other.lo, Round::Floor).round(prec, Round::Floor),
            hi: self.hi.add_dir(&other.hi, Round::Ceil).round(prec, Round::Ceil),
            prec,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let prec = self.prec.max(other.prec);
        let candidates = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            if c.cmp_exact(&lo) == Ordering::Less {
                lo = c.clone();
            }
            if c.cmp_exact(&hi) == Ordering::Greater {
                hi = c.clone();
            }
        }
        Enclosure { lo: lo.round(prec, Round::Floor), hi: hi.round(prec, Round::Ceil), prec }
    }

    /// Reciprocal; errors when the interval may contain zero.
    pub fn recip(&self) -> Result<Enclosure> {
        if self.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec;
        let one = Dyadic::one();
        let lo = one.div_round(&self.hi, prec, Round::Floor).unwrap();
        let hi = one.div_round(&self.lo, prec, Round::Ceil).unwrap();
        Ok(Enclosure { lo, hi, prec })
    }

    pub fn div(&self, other: &Enclosure) -> Result<Enclosure> {
        if other.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec.max(other.prec);
        // endpoint candidates with the rounding direction chosen per side
        let pairs = [(&self.lo, &other.lo), (&self.lo, &other.hi), (&self.hi, &other.lo), (&self.hi, &other.hi)];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (n, d) in pairs {
            let down = n.div_round(d, prec, Round::Floor).unwrap();
            let up = n.div_round(d, prec, Round::Ceil).unwrap();
            lo = Some(match lo {
                None => down,
                Some(cur) => cur.min(down),
            });
            hi = Some(match hi {
                None => up,
                Some(cur) => cur.max(up),
            });
        }
        Ok(Enclosure { lo: lo.unwrap(), hi: hi.unwrap(), prec })
    }

    /// Affine image `a*x + b` over all combinations.
    pub fn affine(a: &Enclosure, b: &Enclosure, x: &Enclosure) -> Enclosure {
        a.mul(x).add(b)
    }

    /// Integer power by repeated squaring (outward at every step).
    pub fn pow_u32(&self, e: u32) -> Enclosure {
        let mut result = Enclosure::from_int(1, self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// Smallest enclosure containing both.
    pub fn join(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.prec.max(other.prec),
        }
    }

    /// Natural logarithm; requires a certainly positive interval.
    pub fn ln(&self) -> Result<Enclosure> {
        if !self.lo.is_positive() {
            return Err(Error::Domain("log of a non-positive enclosure".into()));
        }
        let prec = self.prec;
        let lo = ln_dyadic(&self.lo, prec, Round::Floor);
        let hi = ln_dyadic(&self.hi, prec, Round::Ceil);
        Ok(Enclosure { lo, hi, prec })
    }

    /// Enclosure of ln 2 at the given precision.
    pub fn ln2(prec: u32) -> Enclosure {
        ln2_cached(prec)
    }

    /// Enclosure of sqrt(e) = exp(1/2) at the given precision.
    pub fn sqrt_e(prec: u32) -> Enclosure {
        sqrt_e_cached(prec)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_decimal_string(), self.hi.to_decimal_string())
    }
}

macro_rules! impl_enc_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait for Enclosure {
            type Output = Enclosure;
            fn $method(self, rhs: Enclosure) -> Enclosure {
                Enclosure::$inner(&self, &rhs)
            }
        }
        impl<'a> std::ops::$trait<&'a Enclosure> for Enclosure {
            type Output = Enclosure;
            fn $method(self, rhs: &'a Enclosure) -> Enclosure {
                Enclosure::$inner(&self, rhs)
            }
        }
        impl<'a> std::ops::$trait<&'a Enclosure> for &Enclosure {
            type Output = Enclosure;
            fn $method(self, rhs: &'a Enclosure) -> Enclosure {
                Enclosure::$inner(self, rhs)
            }
        }
    };
}

impl_enc_binop!(Add, add, add);
impl_enc_binop!(Sub, sub, sub);
impl_enc_binop!(Mul, mul, mul);

impl std::ops::Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure::neg(&self)
    }
}

impl std::ops::Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure::neg(self)
    }
}

impl num_traits::Zero for Enclosure {
    fn zero() -> Self {
        Enclosure::from_int(0, default_precision())
    }
    fn is_zero(&self) -> bool {
        self.is_point() && self.lo.is_zero()
    }
}

impl num_traits::One for Enclosure {
    fn one() -> Self {
        Enclosure::from_int(1, default_precision())
    }
    fn is_one(&self) -> bool {
        self.is_point() && self.lo == Dyadic::one()
    }
}

/// Wire format: exact decimal endpoint strings plus the working precision.
#[derive(Serialize, Deserialize)]
struct EnclosureWire {
    lo: String,
    hi: String,
    prec: u32,
}

impl Serialize for Enclosure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        EnclosureWire {
            lo: self.lo.to_decimal_string(),
            hi: self.hi.to_decimal_string(),
            prec: self.prec,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Enclosure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = EnclosureWire::deserialize(deserializer)?;
        let lo = Dyadic::parse_decimal(&wire.lo)
            .ok_or_else(|| serde::de::Error::custom("lo endpoint is not an exact dyadic decimal"))?;
        let hi = Dyadic::parse_decimal(&wire.hi)
            .ok_or_else(|| serde::de::Error::custom("hi endpoint is not an exact dyadic decimal"))?;
        Enclosure::from_endpoints(lo, hi, wire.prec).map_err(serde::de::Error::custom)
    }
}

/// ln of an exact positive dyadic, rounded in `dir` at `prec` bits.
///
/// Reduction: x = m * 2^e with m in [1,2), ln x = e*ln2 + ln m, and
/// ln m = 2*atanh(z) with z = (m-1)/(m+1) in [0,1/3). The atanh series has
/// positive terms and a geometric tail, so an exact rational partial sum
/// plus a tail bound gives a rigorous bracket.
fn ln_dyadic(x: &Dyadic, prec: u32, dir: Round) -> Dyadic {
    debug_assert!(x.is_positive());
    let work = prec + 16;
    let bits = x.sig_bits() as i64;
    // m in [1, 2): mantissa scaled so its leading bit is the units bit
    let e_prime = x.exponent() + bits - 1;
    let m = Dyadic::new(x.mantissa().clone(), -(bits - 1));
    let t = m.to_rational();

    let z = &(&t - &Rational::one()) / &(&t + &Rational::one());
    let (sum, tail) = atanh_series(&z, work);
    // ln m in [2*sum, 2*(sum + tail)]
    let two = Rational::from_int(2);
    let ln_m_lo = &two * &sum;
    let ln_m_hi = &two * &(&sum + &tail);

    let ln2 = ln2_cached(work);
    // e' * ln2 with directed rounding on the relevant side
    let e_rat = Rational::from_int(e_prime);
    let (scale_lo, scale_hi) = if e_prime >= 0 {
        (ln2.lo_rational(), ln2.hi_rational())
    } else {
        (ln2.hi_rational(), ln2.lo_rational())
    };
    match dir {
        Round::Floor => {
            let total = &(&e_rat * &scale_lo) + &ln_m_lo;
            Dyadic::from_rational(&total, prec, Round::Floor)
        }
        Round::Ceil => {
            let total = &(&e_rat * &scale_hi) + &ln_m_hi;
            Dyadic::from_rational(&total, prec, Round::Ceil)
        }
    }
}

/// Exact partial sum and tail bound of atanh(z) = sum z^(2k+1)/(2k+1) for
/// z in [0, 1/3]. Returns (sum, tail) with atanh(z) in [sum, sum + tail].
fn atanh_series(z: &Rational, work_bits: u32) -> (Rational, Rational) {
    debug_assert!(!z.is_negative());
    debug_assert!(*z <= Rational::new(1, 3));
    if z.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let z2 = z * z;
    let mut term_pow = z.clone(); // z^(2k+1)
    let mut sum = Rational::zero();
    let mut k: i64 = 0;
    let threshold = Rational::new_bigint(BigInt::one(), BigInt::one() << (work_bits as usize + 4));
    loop {
        let term = &term_pow / &Rational::from_int(2 * k + 1);
        sum = &sum + &term;
        term_pow = &term_pow * &z2;
        k += 1;
        // tail <= z^(2k+1)/(2k+1) * 1/(1 - z^2) <= term_pow * 9/8 for z <= 1/3
        let tail_bound = &(&term_pow / &Rational::from_int(2 * k + 1)) * &Rational::new(9, 8);
        if tail_bound < threshold {
            return (sum, tail_bound);
        }
    }
}

/// Exact partial sum of exp(1/2) with a rigorous tail: sum (1/2)^k / k!.
fn sqrt_e_bracket(work_bits: u32) -> (Rational, Rational) {
    let half = Rational::new(1, 2);
    let mut term = Rational::one(); // (1/2)^k / k!
    let mut sum = Rational::zero();
    let mut k: i64 = 0;
    let threshold = Rational::new_bigint(BigInt::one(), BigInt::one() << (work_bits as usize + 4));
    loop {
        sum = &sum + &term;
        k += 1;
        term = &(&term * &half) / &Rational::from_int(k);
        // remaining tail < term * sum_{j>=0} (1/2)^j = 2*term
        let tail = &term * &Rational::from_int(2);
        if tail < threshold {
            return (sum, tail);
        }
    }
}

fn constant_cache() -> &'static Mutex<HashMap<(u32, u8), Enclosure>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u8), Enclosure>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn ln2_cached(prec: u32) -> Enclosure {
    if let Some(v) = constant_cache().lock().unwrap().get(&(prec, 0)) {
        return v.clone();
    }
    // ln 2 = 2 * atanh(1/3)
    let (sum, tail) = atanh_series(&Rational::new(1, 3), prec + 8);
    let two = Rational::from_int(2);
    let lo = Dyadic::from_rational(&(&two * &sum), prec, Round::Floor);
    let hi = Dyadic::from_rational(&(&two * &(&sum + &tail)), prec, Round::Ceil);
    let enc = Enclosure { lo, hi, prec };
    constant_cache().lock().unwrap().insert((prec, 0), enc.clone());
    enc
}

fn sqrt_e_cached(prec: u32) -> Enclosure {
    if let Some(v) = constant_cache().lock().unwrap().get(&(prec, 1)) {
        return v.clone();
    }
    let (sum, tail) = sqrt_e_bracket(prec + 8);
    let lo = Dyadic::from_rational(&sum, prec, Round::Floor);
    let hi = Dyadic::from_rational(&(&sum + &tail), prec, Round::Ceil);
    let enc = Enclosure { lo, hi, prec };
    constant_cache().lock().unwrap().insert((prec, 1), enc.clone());
    enc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc(lo: i64, hi: i64) -> Enclosure {
        Enclosure::from_endpoints(Dyadic::from_int(lo), Dyadic::from_int(hi), 64).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn add_exact_endpoints() {
        let s = enc(1, 2).add(&enc(3, 4));
        assert_eq!(s.lo_rational(), rat(4, 1));
        assert_eq!(s.hi_rational(), rat(6, 1));
    }

    #[test]
    fn mul_annihilation() {
        let p = enc(-1, 1).mul(&enc(0, 0));
        assert!(p.is_point());
        assert_eq!(p.lo_rational(), Rational::zero());
    }

    #[test]
    fn third_times_three_contains_one_tightly() {
        let third = Enclosure::from_rational(&rat(1, 3), 64);
        let three = Enclosure::from_int(3, 64);
        let p = third.mul(&three);
        assert!(p.contains_rational(&Rational::one()));
        // width <= 4 ulp of 1 at 64 bits
        let ulp = Dyadic::one().ulp(64);
        let four_ulp = ulp.mul(&Dyadic::from_int(4));
        assert!(p.width().cmp_exact(&four_ulp) <= Ordering::Equal);
    }

    #[test]
    fn exactness_on_dyadic_data() {
        let a = Enclosure::from_rational(&rat(3, 8), 64);
        let b = Enclosure::from_rational(&rat(5, 4), 64);
        assert!(a.is_point() && b.is_point());
        assert!(a.add(&b).is_point());
        assert!(a.mul(&b).is_point());
        assert_eq!(a.mul(&b).as_point_rational().unwrap(), rat(15, 32));
    }

    #[test]
    fn ln_one_is_tiny_around_zero() {
        let one = Enclosure::from_int(1, 64);
        let l = one.ln().unwrap();
        assert!(l.contains_rational(&Rational::zero()));
        let two_ulp = Dyadic::pow2(-64).mul(&Dyadic::from_int(2));
        assert!(l.width().cmp_exact(&two_ulp) <= Ordering::Equal);
    }

    #[test]
    fn ln_two_matches_reference() {
        let two = Enclosure::from_int(2, 96);
        let l = two.ln().unwrap();
        // 30 reference digits of ln 2, exact rational comparison
        let reference = Rational::parse("0.693147180559945309417232121458").unwrap();
        assert!(l.lo_rational() <= reference);
        assert!(l.hi_rational() >= reference);
        // and the bracket is genuinely tight at 96 bits
        assert!(l.width().cmp_exact(&Dyadic::pow2(-90)) == Ordering::Less);
    }

    #[test]
    fn ln_monotone_endpoints() {
        let e = Enclosure::from_endpoints(Dyadic::from_int(2), Dyadic::from_int(4), 64).unwrap();
        let l = e.ln().unwrap();
        let ln2 = Enclosure::ln2(64);
        let ln4 = Enclosure::from_int(4, 64).ln().unwrap();
        assert!(l.lo_rational() <= ln2.lo_rational());
        assert!(l.hi_rational() >= ln4.hi_rational());
    }

    #[test]
    fn ln_rejects_nonpositive() {
        let e = Enclosure::from_endpoints(Dyadic::from_int(0), Dyadic::from_int(1), 64).unwrap();
        assert!(e.ln().is_err());
        assert!(enc(-2, -1).ln().is_err());
    }

    #[test]
    fn affine_examples() {
        let a = Enclosure::from_int(1, 64);
        let b = Enclosure::from_int(0, 64);
        let x = Enclosure::from_rational(&rat(3, 10), 64);
        let img = Enclosure::affine(&a, &b, &x);
        assert!(img.contains_rational(&rat(3, 10)));

        // x = 0 kills a
        let a = Enclosure::from_rational_interval(&rat(9, 10), &Rational::one(), 64).unwrap();
        let b = Enclosure::from_rational_interval(&rat(2, 5), &rat(1, 2), 64).unwrap();
        let img = Enclosure::affine(&a, &b, &Enclosure::from_int(0, 64));
        assert!(img.contains_rational(&rat(2, 5)));
        assert!(img.contains_rational(&rat(1, 2)));
        assert!(img.lo_rational() >= rat(2, 5) - rat(1, 1_000_000));

        // middle-thirds second branch over [0,1]
        let a = Enclosure::from_rational(&rat(1, 3), 64);
        let b = Enclosure::from_rational(&rat(2, 3), 64);
        let x = Enclosure::from_rational_interval(&Rational::zero(), &Rational::one(), 64).unwrap();
        let img = Enclosure::affine(&a, &b, &x);
        assert!(img.contains_rational(&rat(2, 3)));
        assert!(img.contains_rational(&Rational::one()));
    }

    #[test]
    fn sqrt_e_reference_value() {
        let s = Enclosure::sqrt_e(64);
        // exp(1/2) = 1.64872127070012814684865078781...
        let reference = Rational::parse("1.64872127070012814684865078781").unwrap();
        assert!(s.lo_rational() <= reference);
        assert!(s.hi_rational() >= reference);
        assert!(s.width().cmp_exact(&Dyadic::pow2(-60)) == Ordering::Less);
    }

    #[test]
    fn containment_monotonicity() {
        // X ⊆ X', Y ⊆ Y' ⇒ op(X,Y) ⊆ op(X',Y')
        let x = Enclosure::from_rational_interval(&rat(1, 3), &rat(1, 2), 64).unwrap();
        let xp = Enclosure::from_rational_interval(&rat(1, 4), &rat(2, 3), 64).unwrap();
        let y = Enclosure::from_rational_interval(&rat(-1, 5), &rat(1, 7), 64).unwrap();
        let yp = Enclosure::from_rational_interval(&rat(-1, 2), &rat(1, 5), 64).unwrap();
        assert!(xp.add(&yp).contains(&x.add(&y)));
        assert!(xp.mul(&yp).contains(&x.mul(&y)));
        assert!(xp.sub(&yp).contains(&x.sub(&y)));
    }

    #[test]
    fn division_brackets() {
        let one = Enclosure::from_int(1, 64);
        let three = Enclosure::from_int(3, 64);
        let q = one.div(&three).unwrap();
        assert!(q.contains_rational(&rat(1, 3)));
        let zero_cross = enc(-1, 1);
        assert!(one.div(&zero_cross).is_err());
    }

    #[test]
    fn pow_and_join() {
        let half = Enclosure::from_rational(&rat(1, 2), 64);
        let p = half.pow_u32(10);
        assert!(p.contains_rational(&rat(1, 1024)));
        assert!(p.is_point());
        let j = enc(1, 2).join(&enc(5, 6));
        assert_eq!(j.lo_rational(), rat(1, 1));
        assert_eq!(j.hi_rational(), rat(6, 1));
    }
}
