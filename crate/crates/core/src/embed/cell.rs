//! Closed dyadic squares in the `(a,b)` parameter plane.

use serde::{Deserialize, Serialize};

use crate::ifs::Interval;
use crate::num::Rational;

/// The closed square `[ka/2^n, (ka+1)/2^n] × [kb/2^n, (kb+1)/2^n]`.
///
/// Cells are compared in canonical `(level, ka, kb)` order; the certifier
/// processes and records them in this order so output is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParamCell {
    pub level: u32,
    pub ka: i64,
    pub kb: i64,
}

impl ParamCell {
    pub fn side(&self) -> Rational {
        pow2_inv(self.level)
    }

    pub fn a_range(&self) -> Interval<Rational> {
        let s = self.side();
        let lo = &Rational::from_int(self.ka) * &s;
        Interval::rational(lo.clone(), &lo + &s)
    }

    pub fn b_range(&self) -> Interval<Rational> {
        let s = self.side();
        let lo = &Rational::from_int(self.kb) * &s;
        Interval::rational(lo.clone(), &lo + &s)
    }

    /// Closed-cell membership.
    pub fn contains(&self, a: &Rational, b: &Rational) -> bool {
        self.a_range().contains_point(a) && self.b_range().contains_point(b)
    }

    /// Pre-compact in the space of non-singular maps: the closure avoids the
    /// line `a = 0` (positive-band representation, so `ka ≥ 1`).
    pub fn is_precompact(&self) -> bool {
        self.ka >= 1
    }

    /// The four children one level down.
    pub fn children(&self) -> [ParamCell; 4] {
        let l = self.level + 1;
        let (a2, b2) = (self.ka * 2, self.kb * 2);
        [
            ParamCell { level: l, ka: a2, kb: b2 },
            ParamCell { level: l, ka: a2, kb: b2 + 1 },
            ParamCell { level: l, ka: a2 + 1, kb: b2 },
            ParamCell { level: l, ka: a2 + 1, kb: b2 + 1 },
        ]
    }

    /// Whether `self` is `other` or a descendant of it.
    pub fn descends_from(&self, other: &ParamCell) -> bool {
        if self.level < other.level {
            return false;
        }
        let shift = self.level - other.level;
        (self.ka >> shift) == other.ka && (self.kb >> shift) == other.kb
    }

    pub fn area(&self) -> Rational {
        let s = self.side();
        &s * &s
    }

    pub fn center(&self) -> (Rational, Rational) {
        let a = self.a_range();
        let b = self.b_range();
        (
            &(&a.lo + &a.hi) * &Rational::new(1, 2),
            &(&b.lo + &b.hi) * &Rational::new(1, 2),
        )
    }

    pub fn corners(&self) -> [(Rational, Rational); 4] {
        let a = self.a_range();
        let b = self.b_range();
        [
            (a.lo.clone(), b.lo.clone()),
            (a.lo.clone(), b.hi.clone()),
            (a.hi.clone(), b.lo.clone()),
            (a.hi, b.hi),
        ]
    }
}

pub(crate) fn pow2_inv(level: u32) -> Rational {
    Rational::new_bigint(
        num_bigint::BigInt::from(1),
        num_bigint::BigInt::from(1) << level as usize,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn geometry() {
        let c = ParamCell { level: 3, ka: 2, kb: 5 };
        assert_eq!(c.a_range().lo, r(1, 4));
        assert_eq!(c.a_range().hi, r(3, 8));
        assert_eq!(c.b_range().lo, r(5, 8));
        assert_eq!(c.area(), r(1, 64));
        assert!(c.contains(&r(1, 3), &r(2, 3)));
        assert!(!c.contains(&r(1, 2), &r(2, 3)));
        assert!(c.is_precompact());
        assert!(!ParamCell { level: 3, ka: 0, kb: 0 }.is_precompact());
    }

    #[test]
    fn children_tile_parent() {
        let c = ParamCell { level: 2, ka: 1, kb: 3 };
        let kids = c.children();
        let total: Rational =
            kids.iter().fold(Rational::zero(), |acc, k| &acc + &k.area());
        assert_eq!(total, c.area());
        for k in &kids {
            assert!(k.descends_from(&c));
            assert!(!c.descends_from(k));
        }
        assert!(c.descends_from(&c));
    }

    #[test]
    fn closed_cells_share_boundaries() {
        let left = ParamCell { level: 1, ka: 0, kb: 0 };
        let right = ParamCell { level: 1, ka: 1, kb: 0 };
        assert!(left.contains(&r(1, 2), &r(0, 1)));
        assert!(right.contains(&r(1, 2), &r(0, 1)));
    }
}
