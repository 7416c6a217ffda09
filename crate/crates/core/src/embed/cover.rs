//! Cylinder-hull cover tables for the target system.

use crate::error::Result;
use crate::ifs::IFSystem;
use crate::num::{Rational, Scalar};

/// How an interval sits relative to a cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverRelation {
    /// No point of the interval lies in the cover.
    Disjoint,
    /// The interval lies inside a single cover component.
    ContainedInOne,
    /// The interval meets the cover but is not contained in one component.
    Straddles,
}

/// Sorted disjoint closed intervals forming the depth-`n` cylinder cover of
/// a system's attractor. The attractor is a subset of the union, so a point
/// outside the union is provably outside the attractor.
///
/// Alongside the exact components the table carries outward-rounded f64
/// copies used by the search heuristics; every decision that feeds a
/// certificate is confirmed against the exact components.
#[derive(Debug, Clone)]
pub struct CoverTable {
    pub depth: u32,
    intervals: Vec<(Rational, Rational)>,
    widened: Vec<(f64, f64)>,
}

impl CoverTable {
    pub fn build<S: Scalar>(sys: &IFSystem<S>, depth: u32) -> Result<CoverTable> {
        let mut intervals: Vec<(Rational, Rational)> = sys
            .cylinder_cover(depth)
            .into_iter()
            .map(|iv| iv.rational_outer())
            .collect();
        intervals.sort_by(|a, b| a.0.cmp_rat(&b.0));
        // merge touching or overlapping hulls so components are disjoint
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi => {
                    if hi > *last_hi {
                        *last_hi = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        let widened = merged
            .iter()
            .map(|(lo, hi)| (rational_f64_down(lo), rational_f64_up(hi)))
            .collect();
        Ok(CoverTable { depth, intervals: merged, widened })
    }

    pub fn components(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    /// Exact membership of a point in the union.
    pub fn contains_point(&self, x: &Rational) -> bool {
        let idx = self.intervals.partition_point(|(lo, _)| lo <= x);
        if idx == 0 {
            return false;
        }
        let (_, hi) = &self.intervals[idx - 1];
        x <= hi
    }

    /// Exact classification of a closed interval against the union.
    pub fn classify(&self, lo: &Rational, hi: &Rational) -> CoverRelation {
        debug_assert!(lo <= hi);
        // first component whose upper end reaches lo
        let start = self.intervals.partition_point(|(_, chi)| chi < lo);
        if start == self.intervals.len() {
            return CoverRelation::Disjoint;
        }
        let (clo, chi) = &self.intervals[start];
        if clo > hi {
            return CoverRelation::Disjoint;
        }
        if clo <= lo && hi <= chi {
            return CoverRelation::ContainedInOne;
        }
        CoverRelation::Straddles
    }

    /// Fast conservative classification against the outward-rounded f64
    /// components: `Disjoint`/`ContainedInOne` from here may be refuted by
    /// the exact components (callers must confirm), `Straddles` is the
    /// fallback.
    pub fn classify_f64(&self, lo: f64, hi: f64) -> CoverRelation {
        let start = self.widened.partition_point(|&(_, chi)| chi < lo);
        if start == self.widened.len() {
            return CoverRelation::Disjoint;
        }
        let (clo, chi) = self.widened[start];
        if clo > hi {
            return CoverRelation::Disjoint;
        }
        if clo <= lo && hi <= chi {
            return CoverRelation::ContainedInOne;
        }
        CoverRelation::Straddles
    }

    /// Distance from a point to the union (0 inside), heuristic ordering
    /// only.
    pub fn distance_f64(&self, x: f64) -> f64 {
        let idx = self.widened.partition_point(|&(lo, _)| lo <= x);
        let mut best = f64::INFINITY;
        if idx > 0 {
            let (_, hi) = self.widened[idx - 1];
            if x <= hi {
                return 0.0;
            }
            best = best.min(x - hi);
        }
        if idx < self.widened.len() {
            best = best.min(self.widened[idx].0 - x);
        }
        best
    }
}

/// Outward f64 bound below a rational (exact conversion of the 53-bit
/// directed rounding, so the result is a true lower bound).
pub(crate) fn rational_f64_down(q: &Rational) -> f64 {
    crate::num::Dyadic::from_rational(q, 53, crate::num::Round::Floor).to_f64()
}

/// Outward f64 bound above a rational.
pub(crate) fn rational_f64_up(q: &Rational) -> f64 {
    crate::num::Dyadic::from_rational(q, 53, crate::num::Round::Ceil).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn middle_thirds() -> IFSystem<Rational> {
        IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 3), r(0, 1)),
            (r(1, 3), r(2, 3)),
        ])
        .unwrap()
    }

    #[test]
    fn classify_against_depth_one() {
        let cover = CoverTable::build(&middle_thirds(), 1).unwrap();
        assert_eq!(cover.components().len(), 2);
        assert_eq!(cover.classify(&r(2, 5), &r(1, 2)), CoverRelation::Disjoint);
        assert_eq!(cover.classify(&r(0, 1), &r(1, 4)), CoverRelation::ContainedInOne);
        assert_eq!(cover.classify(&r(1, 4), &r(3, 4)), CoverRelation::Straddles);
        assert!(cover.contains_point(&r(1, 3)));
        assert!(!cover.contains_point(&r(1, 2)));
    }

    #[test]
    fn cover_depth_two_has_four_components() {
        let cover = CoverTable::build(&middle_thirds(), 2).unwrap();
        assert_eq!(cover.components().len(), 4);
        assert!(cover.contains_point(&r(2, 9)));
        assert!(!cover.contains_point(&r(1, 6)));
    }

    #[test]
    fn touching_pieces_merge() {
        let touching = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 2), r(0, 1)),
            (r(1, 2), r(1, 2)),
        ])
        .unwrap();
        let cover = CoverTable::build(&touching, 3).unwrap();
        assert_eq!(cover.components().len(), 1);
        assert_eq!(cover.classify(&r(1, 4), &r(3, 4)), CoverRelation::ContainedInOne);
    }
}
