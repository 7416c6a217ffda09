//! Self-similar sets on the line.
//!
//! An [`IFSystem`] is a finite list of contracting affine maps
//! `φ_i(x) = ratio·x + translation` together with the convex hull of its
//! attractor, a strong-separation certification status, and the engulfing
//! constant `ρ`. Coefficients are generic over [`Scalar`]: exact rationals
//! or rigorous enclosures.
//!
//! Conventions: systems are normalized so the hull is `[0,1]`; cylinder
//! words compose left-to-right (`φ_{uv} = φ_u ∘ φ_v`); the scaling constant
//! of a map is the absolute value of its linear coefficient.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{Rational, Scalar};

/// Closed interval with scalar endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: S) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> S {
        self.hi.clone() - &self.lo
    }

    /// Outer rational bounds `[lower(lo), upper(hi)]`.
    pub fn rational_outer(&self) -> (Rational, Rational) {
        (self.lo.rational_lower(), self.hi.rational_upper())
    }

    /// Inner rational bounds `[upper(lo), lower(hi)]` (may be empty).
    pub fn rational_inner(&self) -> (Rational, Rational) {
        (self.lo.rational_upper(), self.hi.rational_lower())
    }

    /// `other ⊆ self` for every represented endpoint pair.
    pub fn certainly_contains(&self, other: &Interval<S>) -> bool {
        self.lo.rational_upper() <= other.lo.rational_lower()
            && other.hi.rational_upper() <= self.hi.rational_lower()
    }

    pub fn certainly_contains_point(&self, x: &Rational) -> bool {
        self.lo.rational_upper() <= *x && *x <= self.hi.rational_lower()
    }

    /// The two intervals certainly share no point.
    pub fn certainly_disjoint(&self, other: &Interval<S>) -> bool {
        self.hi.rational_upper() < other.lo.rational_lower()
            || other.hi.rational_upper() < self.lo.rational_lower()
    }

    pub fn join(&self, other: &Interval<S>) -> Interval<S> {
        let lo = if self.lo.rational_lower() <= other.lo.rational_lower() {
            self.lo.clone()
        } else {
            other.lo.clone()
        };
        let hi = if self.hi.rational_upper() >= other.hi.rational_upper() {
            self.hi.clone()
        } else {
            other.hi.clone()
        };
        Interval { lo, hi }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

impl Interval<Rational> {
    pub fn rational(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi }
    }

    pub fn unit() -> Self {
        Interval { lo: Rational::zero(), hi: Rational::one() }
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }
}

/// Affine map `x ↦ ratio·x + translation` with a nonzero linear part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap1D<S> {
    pub ratio: S,
    pub translation: S,
}

impl<S: Scalar> AffineMap1D<S> {
    pub fn new(ratio: S, translation: S) -> Result<Self> {
        if !ratio.certainly_nonzero() {
            return Err(Error::Invalid("affine map ratio must exclude zero".into()));
        }
        Ok(AffineMap1D { ratio, translation })
    }

    pub fn identity() -> Self {
        AffineMap1D { ratio: S::one(), translation: S::zero() }
    }

    pub fn from_rationals(ratio: &Rational, translation: &Rational) -> Result<Self> {
        Self::new(S::from_rational(ratio), S::from_rational(translation))
    }

    pub fn apply(&self, x: &S) -> S {
        self.ratio.clone() * x + &self.translation
    }

    /// Scaling constant `‖f‖ = |ratio|`.
    pub fn norm(&self) -> S {
        self.ratio.abs()
    }

    pub fn orientation_preserving(&self) -> bool {
        self.ratio.certainly_positive()
    }

    /// Composition `self ∘ inner`: first apply `inner`, then `self`.
    pub fn compose(&self, inner: &AffineMap1D<S>) -> AffineMap1D<S> {
        AffineMap1D {
            ratio: self.ratio.clone() * &inner.ratio,
            translation: self.ratio.clone() * &inner.translation + &self.translation,
        }
    }

    /// Exact inverse map `x ↦ (x − translation)/ratio`.
    pub fn inverse(&self) -> Result<AffineMap1D<S>> {
        let inv_ratio = S::one().try_div(&self.ratio)?;
        let translation = (S::zero() - &self.translation).try_div(&self.ratio)?;
        Ok(AffineMap1D { ratio: inv_ratio, translation })
    }

    pub fn fixed_point(&self) -> Result<S> {
        let denom = S::one() - &self.ratio;
        if !denom.certainly_nonzero() {
            return Err(Error::Domain("fixed point of a map with ratio 1".into()));
        }
        self.translation.try_div(&denom)
    }

    /// Image interval, orientation-aware.
    pub fn apply_interval(&self, iv: &Interval<S>) -> Interval<S> {
        if self.ratio.certainly_positive() {
            Interval { lo: self.apply(&iv.lo), hi: self.apply(&iv.hi) }
        } else {
            Interval { lo: self.apply(&iv.hi), hi: self.apply(&iv.lo) }
        }
    }

    pub fn is_contraction(&self) -> bool {
        self.norm().rational_upper() < Rational::one()
    }
}

/// Finite word of map indices (0-based internally, 1-based in display).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(i: u8) -> Self {
        Word(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, i: u8) {
        self.0.push(i);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Count vector `n(w)`: occurrences of each symbol among `len` symbols.
    pub fn count_vector(&self, len: usize) -> Vec<u64> {
        let mut counts = vec![0u64; len];
        for &s in &self.0 {
            counts[s as usize] += 1;
        }
        counts
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for &s in &self.0 {
            if s < 9 {
                write!(f, "{}", s + 1)?;
            } else {
                write!(f, "({})", s as u32 + 1)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Word::empty());
        }
        let mut out = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            if c.is_ascii_digit() {
                let d = c.to_digit(10).unwrap();
                if d == 0 {
                    return Err(Error::Invalid("word symbols are 1-based".into()));
                }
                out.push((d - 1) as u8);
            } else if c == '(' {
                let mut num = String::new();
                for c2 in chars.by_ref() {
                    if c2 == ')' {
                        break;
                    }
                    num.push(c2);
                }
                let d: u32 =
                    num.parse().map_err(|_| Error::Invalid(format!("bad word symbol ({num})")))?;
                if d == 0 {
                    return Err(Error::Invalid("word symbols are 1-based".into()));
                }
                out.push((d - 1) as u8);
            } else {
                return Err(Error::Invalid(format!("bad word character {c:?}")));
            }
        }
        Ok(Word(out))
    }
}

impl Serialize for Word {
    fn serialize<Ser: serde::Serializer>(
        &self,
        serializer: Ser,
    ) -> std::result::Result<Ser::Ok, Ser::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Word::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Strong-separation certification status of a system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SeparationStatus {
    /// Depth-`m` cylinder-hull covers of the first-level pieces are pairwise
    /// disjoint (sufficient condition for strong separation).
    Certified { depth: u32 },
    /// Two first-level pieces provably share the witness point.
    Refuted { witness: Rational },
    /// Neither certified nor refuted up to the recorded depth.
    Unknown { max_depth_tried: u32 },
}

impl SeparationStatus {
    pub fn is_certified(&self) -> bool {
        matches!(self, SeparationStatus::Certified { .. })
    }
}

/// Iterated function system of contracting affine maps with separation
/// metadata.
#[derive(Debug, Clone)]
pub struct IFSystem<S> {
    maps: Vec<AffineMap1D<S>>,
    hull: Interval<S>,
    hull_exact: bool,
    separation: SeparationStatus,
    rho: Option<Rational>,
}

impl<S: Scalar> IFSystem<S> {
    /// Build a system from its maps; computes the attractor hull.
    pub fn new(maps: Vec<AffineMap1D<S>>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::Invalid("a system needs at least two maps".into()));
        }
        if maps.len() > 64 {
            return Err(Error::Invalid("too many maps".into()));
        }
        for m in &maps {
            if !m.is_contraction() {
                return Err(Error::Invalid("all maps must be contractions".into()));
            }
            if !m.ratio.certainly_nonzero() {
                return Err(Error::Invalid("map ratio must exclude zero".into()));
            }
        }
        let (hull, hull_exact) = attractor_hull(&maps)?;
        Ok(IFSystem {
            maps,
            hull,
            hull_exact,
            separation: SeparationStatus::Unknown { max_depth_tried: 0 },
            rho: None,
        })
    }

    pub fn from_rational_coeffs(coeffs: &[(Rational, Rational)]) -> Result<Self> {
        let maps = coeffs
            .iter()
            .map(|(r, t)| AffineMap1D::from_rationals(r, t))
            .collect::<Result<Vec<_>>>()?;
        IFSystem::new(maps)
    }

    pub fn maps(&self) -> &[AffineMap1D<S>] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn map(&self, i: usize) -> Result<&AffineMap1D<S>> {
        self.maps.get(i).ok_or(Error::BadIndex { index: i, len: self.maps.len() })
    }

    /// Convex hull of the attractor. Exact for rational systems; an outer
    /// bound for enclosure systems.
    pub fn hull(&self) -> &Interval<S> {
        &self.hull
    }

    pub fn hull_is_exact(&self) -> bool {
        self.hull_exact
    }

    pub fn separation(&self) -> &SeparationStatus {
        &self.separation
    }

    /// Engulfing constant `ρ = 1/gap`; available once separation has been
    /// certified with positive first-level gaps.
    pub fn rho(&self) -> Result<&Rational> {
        self.rho.as_ref().ok_or_else(|| {
            Error::NotSeparated("engulfing constant requires certified separation".into())
        })
    }

    /// All maps share one scaling constant (exact check).
    pub fn homogeneous_ratio(&self) -> Option<Rational> {
        let first = self.maps[0].norm().as_exact_rational()?;
        for m in &self.maps[1..] {
            if m.norm().as_exact_rational()? != first {
                return None;
            }
        }
        Some(first)
    }

    /// Exact composition of the maps selected by `word`, left to right.
    pub fn compose_word(&self, word: &Word) -> Result<AffineMap1D<S>> {
        let mut acc = AffineMap1D::identity();
        for &s in &word.0 {
            let m = self.map(s as usize)?;
            acc = acc.compose(m);
        }
        Ok(acc)
    }

    /// Cylinder hull `φ_w(hull)`.
    pub fn cylinder_hull(&self, word: &Word) -> Result<Interval<S>> {
        Ok(self.compose_word(word)?.apply_interval(&self.hull))
    }

    /// The `|I|^depth` cylinder hulls at the given depth, in lexicographic
    /// word order.
    pub fn cylinder_cover(&self, depth: u32) -> Vec<Interval<S>> {
        let mut cover = vec![self.hull.clone()];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(cover.len() * self.maps.len());
            for m in &self.maps {
                for iv in &cover {
                    next.push(m.apply_interval(iv));
                }
            }
            // order fix: we built [m0(all), m1(all), ...] over the previous
            // level, which is exactly lexicographic word order
            cover = next;
        }
        cover
    }

    /// Conjugate every map by the orientation-preserving change of
    /// coordinates sending the hull onto `[0,1]`.
    pub fn normalize(&self) -> Result<IFSystem<S>> {
        let width = self.hull.width();
        if !width.certainly_positive() {
            return Err(Error::Domain("trivial self-similar set (degenerate hull)".into()));
        }
        let lo = &self.hull.lo;
        // g(x) = (x - lo)/width; conjugate φ = g ∘ φ ∘ g⁻¹ keeps the ratio and
        // moves the translation to (ratio·lo + translation - lo)/width.
        let maps = self
            .maps
            .iter()
            .map(|m| {
                let shifted = m.ratio.clone() * lo + &m.translation - lo;
                Ok(AffineMap1D { ratio: m.ratio.clone(), translation: shifted.try_div(&width)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sys = IFSystem::new(maps)?;
        if sys.hull_exact {
            debug_assert_eq!(sys.hull.lo.as_exact_rational(), Some(Rational::zero()));
            debug_assert_eq!(sys.hull.hi.as_exact_rational(), Some(Rational::one()));
            // pin the exact unit hull
            sys.hull = Interval::new(S::zero(), S::one());
        }
        Ok(sys)
    }

    /// `true` when the hull is exactly `[0,1]`.
    pub fn is_normalized(&self) -> bool {
        self.hull.lo.as_exact_rational() == Some(Rational::zero())
            && self.hull.hi.as_exact_rational() == Some(Rational::one())
    }

    /// Conjugate a normalized system by `x ↦ 1 − x`. The attractor is the
    /// mirror image; ratios are unchanged, so orientation is preserved.
    pub fn reflect(&self) -> Result<IFSystem<S>> {
        if !self.is_normalized() {
            return Err(Error::Invalid("reflect requires a normalized system".into()));
        }
        let maps = self
            .maps
            .iter()
            .map(|m| AffineMap1D {
                ratio: m.ratio.clone(),
                translation: S::one() - &m.ratio - &m.translation,
            })
            .collect();
        let mut sys = IFSystem::new(maps)?;
        sys.separation = self.separation.clone();
        sys.rho = self.rho.clone();
        if self.hull_exact {
            sys.hull = Interval::new(S::zero(), S::one());
        }
        Ok(sys)
    }

    /// Try to certify or refute strong separation by cylinder covers of
    /// increasing depth; records the outcome and the engulfing constant.
    pub fn check_strong_separation(&mut self, max_depth: u32) -> &SeparationStatus {
        for depth in 1..=max_depth.max(1) {
            if self.cover_certifies(depth) {
                self.separation = SeparationStatus::Certified { depth };
                self.rho = self.compute_rho_from_gap().ok();
                return &self.separation;
            }
            if let Some(witness) = self.refutation_witness(depth) {
                self.separation = SeparationStatus::Refuted { witness };
                return &self.separation;
            }
        }
        self.separation = SeparationStatus::Unknown { max_depth_tried: max_depth };
        &self.separation
    }

    /// Depth-`m` cylinder covers of distinct first-level pieces are pairwise
    /// certainly disjoint.
    fn cover_certifies(&self, depth: u32) -> bool {
        // item = (piece index, cylinder hull at depth `depth` within piece)
        let sub_cover = self.cylinder_cover(depth - 1);
        let mut items: Vec<(usize, (Rational, Rational))> = Vec::new();
        for (pi, m) in self.maps.iter().enumerate() {
            for iv in &sub_cover {
                let img = m.apply_interval(iv);
                items.push((pi, img.rational_outer()));
            }
        }
        items.sort_by(|a, b| a.1 .0.cmp_rat(&b.1 .0));
        let mut max_hi: Vec<Option<Rational>> = vec![None; self.maps.len()];
        for (piece, (lo, hi)) in items {
            for (q, m) in max_hi.iter().enumerate() {
                if q != piece {
                    if let Some(mh) = m {
                        if *mh >= lo {
                            return false;
                        }
                    }
                }
            }
            let entry = &mut max_hi[piece];
            let new_hi = match entry.take() {
                None => hi,
                Some(old) => old.max(hi),
            };
            *entry = Some(new_hi);
        }
        true
    }

    /// Exactly representable common point of two distinct first-level
    /// pieces, witnessed by cylinder images of the hull endpoints.
    fn refutation_witness(&self, depth: u32) -> Option<Rational> {
        if !self.hull_exact {
            return None;
        }
        let sub_cover = self.cylinder_cover(depth - 1);
        let mut seen: std::collections::HashMap<Rational, usize> = std::collections::HashMap::new();
        for (pi, m) in self.maps.iter().enumerate() {
            for iv in &sub_cover {
                let img = m.apply_interval(iv);
                for endpoint in [&img.lo, &img.hi] {
                    let p = endpoint.as_exact_rational()?;
                    // endpoints of cylinder hulls are cylinder images of the
                    // hull endpoints, which lie in the attractor
                    match seen.get(&p) {
                        Some(&other) if other != pi => return Some(p),
                        _ => {
                            seen.insert(p, pi);
                        }
                    }
                }
            }
        }
        None
    }

    /// Engulfing constant from the minimum first-level gap.
    fn compute_rho_from_gap(&self) -> Result<Rational> {
        let gap = self.first_level_gap()?;
        if gap <= Rational::zero() {
            return Err(Error::NotSeparated(
                "first-level cylinder hulls have no positive gap".into(),
            ));
        }
        let width = self.hull.width();
        let (w_lo, _) = (width.rational_lower(), width.rational_upper());
        if w_lo <= Rational::zero() {
            return Err(Error::Domain("degenerate hull".into()));
        }
        // normalized gap g = gap / diam(hull); ρ = 1/g
        Ok(&w_lo / &gap)
    }

    /// Minimum certified distance between distinct first-level hulls.
    fn first_level_gap(&self) -> Result<Rational> {
        let mut hulls: Vec<(Rational, Rational)> =
            self.maps.iter().map(|m| m.apply_interval(&self.hull).rational_outer()).collect();
        hulls.sort_by(|a, b| a.0.cmp_rat(&b.0));
        let mut gap: Option<Rational> = None;
        for pair in hulls.windows(2) {
            let g = &pair[1].0 - &pair[0].1;
            gap = Some(match gap {
                None => g,
                Some(cur) => cur.min(g),
            });
        }
        gap.ok_or_else(|| Error::Invalid("fewer than two maps".into()))
    }

    /// Engulfing constant `ρ`; certifies separation first when needed.
    pub fn compute_rho(&mut self, max_depth: u32) -> Result<Rational> {
        if self.rho.is_none() {
            if !self.separation.is_certified() {
                self.check_strong_separation(max_depth);
            }
            if !self.separation.is_certified() {
                return Err(Error::NotSeparated(format!(
                    "separation not certified up to depth {max_depth}"
                )));
            }
            if self.rho.is_none() {
                self.rho = Some(self.compute_rho_from_gap()?);
            }
        }
        Ok(self.rho.clone().unwrap())
    }

    /// Longest word `w` with `Z ⊆ φ_w(hull)`, found by greedy descent into
    /// the containing child. Descent stops at `max_depth` (needed when `Z`
    /// is a single point).
    pub fn engulf(&self, z: &Interval<S>, max_depth: u32) -> Result<Word> {
        if !self.hull.certainly_contains(z) {
            return Err(Error::Domain("engulf target escapes the hull".into()));
        }
        let mut word = Word::empty();
        let mut current = AffineMap1D::identity();
        for _ in 0..max_depth {
            let mut descended = false;
            for (i, m) in self.maps.iter().enumerate() {
                let child = current.compose(m);
                let child_hull = child.apply_interval(&self.hull);
                if child_hull.certainly_contains(z) {
                    word.push(i as u8);
                    current = child;
                    descended = true;
                    break;
                }
            }
            if !descended {
                break;
            }
        }
        Ok(word)
    }
}

/// Hull of the attractor. Each hull endpoint satisfies a closed extreme-pair
/// recursion: it is a fixed point of one map, the image of the other
/// endpoint when that endpoint is a fixed point, or a point of a two-map
/// cycle (the orientation-reversing cases). The envelope of all such
/// candidate points is the hull; for exact systems the result is verified
/// invariant (`φ_i(H) ⊆ H`).
fn attractor_hull<S: Scalar>(maps: &[AffineMap1D<S>]) -> Result<(Interval<S>, bool)> {
    let mut candidates: Vec<S> = Vec::new();
    let mut fixed_points: Vec<S> = Vec::new();
    for m in maps {
        fixed_points.push(m.fixed_point()?);
    }
    for mi in maps {
        for (j, mj) in maps.iter().enumerate() {
            // u = φ_i(v), v = φ_j(u)  ⇒  u = (t_i + r_i t_j)/(1 − r_i r_j)
            let denom = S::one() - &(mi.ratio.clone() * &mj.ratio);
            if !denom.certainly_nonzero() {
                return Err(Error::Domain("cycle ratio reaches 1".into()));
            }
            let num = mi.translation.clone() + &(mi.ratio.clone() * &mj.translation);
            let u = num.try_div(&denom)?;
            candidates.push(u);
            // one extreme the image of the other: φ_i(fixed point of φ_j)
            candidates.push(mi.apply(&fixed_points[j]));
        }
    }
    let mut lo = candidates[0].clone();
    let mut hi = candidates[0].clone();
    for c in &candidates[1..] {
        if c.rational_lower() < lo.rational_lower() {
            lo = c.clone();
        }
        if c.rational_upper() > hi.rational_upper() {
            hi = c.clone();
        }
    }
    let hull = Interval::new(lo, hi);
    let exact = candidates.iter().all(|c| c.as_exact_rational().is_some());
    if exact {
        let (hlo, hhi) = hull.rational_outer();
        for m in maps {
            let img = m.apply_interval(&hull);
            let (ilo, ihi) = img.rational_outer();
            if ilo < hlo || ihi > hhi {
                return Err(Error::Domain("hull candidates failed invariance".into()));
            }
        }
        if hlo == hhi {
            return Err(Error::Domain("trivial self-similar set (common fixed point)".into()));
        }
    }
    Ok((hull, exact))
}

/// Wire form for IFS config files: `{"maps": [{"ratio": "1/3", ...}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsConfig {
    pub maps: Vec<MapCoeffs>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapCoeffs {
    pub ratio: Rational,
    pub translation: Rational,
}

impl IfsConfig {
    pub fn to_system(&self) -> Result<IFSystem<Rational>> {
        let coeffs: Vec<(Rational, Rational)> =
            self.maps.iter().map(|m| (m.ratio.clone(), m.translation.clone())).collect();
        IFSystem::<Rational>::from_rational_coeffs(&coeffs)
    }

    pub fn from_system(sys: &IFSystem<Rational>) -> Self {
        IfsConfig {
            maps: sys
                .maps()
                .iter()
                .map(|m| MapCoeffs { ratio: m.ratio.clone(), translation: m.translation.clone() })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Enclosure;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// The middle-thirds Cantor system {x/3, x/3 + 2/3}.
    pub fn middle_thirds() -> IFSystem<Rational> {
        IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 3), r(0, 1)),
            (r(1, 3), r(2, 3)),
        ])
        .unwrap()
    }

    /// The quarter system {x/4, x/4 + 3/4}.
    pub fn quarter_system() -> IFSystem<Rational> {
        IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 4), r(0, 1)),
            (r(1, 4), r(3, 4)),
        ])
        .unwrap()
    }

    fn w(s: &str) -> Word {
        Word::from_str(s).unwrap()
    }

    #[test]
    fn compose_word_examples() {
        let sys = middle_thirds();
        let id = sys.compose_word(&Word::empty()).unwrap();
        assert_eq!(id.ratio, r(1, 1));
        assert_eq!(id.translation, r(0, 1));

        let second = sys.compose_word(&w("2")).unwrap();
        assert_eq!(second.ratio, r(1, 3));
        assert_eq!(second.translation, r(2, 3));

        // φ₁∘φ₂(x) = (x/3 + 2/3)/3 = x/9 + 2/9
        let both = sys.compose_word(&w("12")).unwrap();
        assert_eq!(both.ratio, r(1, 9));
        assert_eq!(both.translation, r(2, 9));

        assert!(sys.compose_word(&Word(vec![7])).is_err());
    }

    #[test]
    fn compose_word_is_a_homomorphism() {
        let sys = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 3), r(0, 1)),
            (r(1, 4), r(9, 20)),
            (r(1, 5), r(4, 5)),
        ])
        .unwrap();
        let mut seed = 0x9E3779B97F4A7C15u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..500 {
            let lu = (rng() % 6) as usize;
            let lv = (rng() % 6) as usize;
            let u = Word((0..lu).map(|_| (rng() % 3) as u8).collect());
            let v = Word((0..lv).map(|_| (rng() % 3) as u8).collect());
            let uv = sys.compose_word(&u.concat(&v)).unwrap();
            let composed = sys.compose_word(&u).unwrap().compose(&sys.compose_word(&v).unwrap());
            assert_eq!(uv, composed);
        }
    }

    #[test]
    fn norm_is_multiplicative_and_homogeneous_systems_power_up() {
        let sys = middle_thirds();
        let word = w("12211");
        let c = sys.compose_word(&word).unwrap();
        assert_eq!(c.norm(), r(1, 243)); // (1/3)^5
        assert_eq!(sys.homogeneous_ratio(), Some(r(1, 3)));

        let mixed = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 3), r(0, 1)),
            (r(1, 4), r(3, 4)),
        ])
        .unwrap();
        assert_eq!(mixed.homogeneous_ratio(), None);
        let cw = mixed.compose_word(&w("121")).unwrap();
        assert_eq!(cw.norm(), &(&r(1, 3) * &r(1, 4)) * &r(1, 3));
    }

    #[test]
    fn hull_examples() {
        assert_eq!(middle_thirds().hull().rational_outer(), (r(0, 1), r(1, 1)));

        let half = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 4), r(0, 1)),
            (r(1, 4), r(3, 8)),
        ])
        .unwrap();
        assert_eq!(half.hull().rational_outer(), (r(0, 1), r(1, 2)));

        assert_eq!(quarter_system().hull().rational_outer(), (r(0, 1), r(1, 1)));
    }

    #[test]
    fn hull_of_orientation_reversing_system() {
        // {-x/3 + 1, x/3} : reversing first map
        let sys = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(-1, 3), r(1, 1)),
            (r(1, 3), r(0, 1)),
        ])
        .unwrap();
        let (lo, hi) = sys.hull().rational_outer();
        // invariance verified inside the constructor for exact systems
        assert!(lo < hi);
        for m in sys.maps() {
            let img = m.apply_interval(sys.hull());
            assert!(img.rational_outer().0 >= lo && img.rational_outer().1 <= hi);
        }
        // endpoints are attained: hi = φ₁(fixed point of φ₂) = φ₁(0) = 1
        assert_eq!(hi, r(1, 1));
        assert_eq!(lo, r(0, 1));
    }

    #[test]
    fn normalize_examples() {
        let half = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 4), r(0, 1)),
            (r(1, 4), r(3, 8)),
        ])
        .unwrap();
        let normed = half.normalize().unwrap();
        assert!(normed.is_normalized());
        assert_eq!(normed.maps()[0].translation, r(0, 1));
        assert_eq!(normed.maps()[1].translation, r(3, 4));
        // ratios preserved
        assert_eq!(normed.maps()[0].ratio, r(1, 4));
        assert_eq!(normed.maps()[1].ratio, r(1, 4));

        // idempotent
        let again = normed.normalize().unwrap();
        assert_eq!(again.maps()[0], normed.maps()[0]);
        assert_eq!(again.maps()[1], normed.maps()[1]);

        // already-normalized system unchanged
        let mt = middle_thirds().normalize().unwrap();
        assert_eq!(mt.maps()[1].translation, r(2, 3));
    }

    #[test]
    fn normalize_degenerate_hull_errors() {
        // both maps fix 0: attractor is the single point {0}
        let sys = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 3), r(0, 1)),
            (r(1, 2), r(0, 1)),
        ]);
        assert!(sys.is_err());
    }

    #[test]
    fn separation_examples() {
        let mut mt = middle_thirds();
        assert_eq!(
            mt.check_strong_separation(8),
            &SeparationStatus::Certified { depth: 1 }
        );
        assert_eq!(mt.rho().unwrap(), &r(3, 1));

        let mut touching = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 2), r(0, 1)),
            (r(1, 2), r(1, 2)),
        ])
        .unwrap();
        match touching.check_strong_separation(6) {
            SeparationStatus::Refuted { witness } => assert_eq!(witness, &r(1, 2)),
            other => panic!("expected refutation, got {other:?}"),
        }

        let mut q = quarter_system();
        assert_eq!(q.check_strong_separation(8), &SeparationStatus::Certified { depth: 1 });
        assert_eq!(q.rho().unwrap(), &r(2, 1));

        let mut five = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 5), r(0, 1)),
            (r(1, 5), r(4, 5)),
        ])
        .unwrap();
        five.check_strong_separation(4);
        assert_eq!(five.rho().unwrap(), &r(5, 3));
    }

    #[test]
    fn cylinder_cover_examples() {
        let sys = middle_thirds();
        let c0 = sys.cylinder_cover(0);
        assert_eq!(c0.len(), 1);
        assert_eq!(c0[0].rational_outer(), (r(0, 1), r(1, 1)));

        let c1 = sys.cylinder_cover(1);
        assert_eq!(c1.len(), 2);
        assert_eq!(c1[0].rational_outer(), (r(0, 1), r(1, 3)));
        assert_eq!(c1[1].rational_outer(), (r(2, 3), r(1, 1)));

        let c2 = sys.cylinder_cover(2);
        assert_eq!(c2.len(), 4);
        let starts: Vec<Rational> = c2.iter().map(|iv| iv.rational_outer().0).collect();
        assert_eq!(starts, vec![r(0, 1), r(2, 9), r(2, 3), r(8, 9)]);
        for iv in &c2 {
            assert_eq!(iv.width(), r(1, 9));
        }
    }

    #[test]
    fn cover_refinement() {
        let sys = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 3), r(0, 1)),
            (r(1, 4), r(9, 20)),
            (r(1, 5), r(4, 5)),
        ])
        .unwrap();
        for n in 0..3u32 {
            let coarse = sys.cylinder_cover(n);
            let fine = sys.cylinder_cover(n + 1);
            for f in &fine {
                let inside = coarse
                    .iter()
                    .filter(|c| {
                        c.rational_outer().0 <= f.rational_outer().0
                            && f.rational_outer().1 <= c.rational_outer().1
                    })
                    .count();
                assert_eq!(inside, 1, "each fine cylinder lies inside exactly one coarse one");
            }
        }
    }

    #[test]
    fn engulf_examples() {
        let mut q = quarter_system();
        q.check_strong_separation(4);

        let z = Interval::rational(r(0, 1), r(1, 16));
        assert_eq!(q.engulf(&z, 40).unwrap(), w("11"));

        let full = Interval::rational(r(0, 1), r(1, 1));
        assert_eq!(q.engulf(&full, 40).unwrap(), Word::empty());

        let wide = Interval::rational(r(1, 10), r(9, 10));
        assert_eq!(q.engulf(&wide, 40).unwrap(), Word::empty());

        let outside = Interval::rational(r(0, 1), r(2, 1));
        assert!(q.engulf(&outside, 40).is_err());
    }

    #[test]
    fn engulf_containment_and_maximality() {
        let mut sys = middle_thirds();
        sys.check_strong_separation(4);
        let mut seed = 0xDEADBEEFCAFEF00Du64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..200 {
            // Z = hull of two random cylinder points
            let mut pts = Vec::new();
            for _ in 0..2 {
                let len = (rng() % 7) as usize;
                let word = Word((0..len).map(|_| (rng() % 2) as u8).collect());
                let p = sys.compose_word(&word).unwrap().apply(&r(0, 1));
                pts.push(p);
            }
            pts.sort();
            if pts[0] == pts[1] {
                // single-point targets descend to the depth cap; maximality
                // only applies to proper intervals
                continue;
            }
            let z = Interval::rational(pts[0].clone(), pts[1].clone());
            let jj = sys.engulf(&z, 64).unwrap();
            let jj_hull = sys.cylinder_hull(&jj).unwrap();
            assert!(jj_hull.certainly_contains(&z), "containment");
            for i in 0..sys.len() {
                let mut ext = jj.clone();
                ext.push(i as u8);
                let ext_hull = sys.cylinder_hull(&ext).unwrap();
                assert!(!ext_hull.certainly_contains(&z), "maximality");
            }
        }
    }

    /// Randomized oracle for the engulfing bound: diam φ_jj(hull) ≤ ρ·diam Z
    /// for two-point targets (ties occur exactly at gap-aligned pairs).
    #[test]
    fn engulf_rho_bound_randomized() {
        for (coeffs, expect_rho) in [
            (vec![(r(1, 3), r(0, 1)), (r(1, 3), r(2, 3))], r(3, 1)),
            (vec![(r(1, 4), r(0, 1)), (r(1, 4), r(3, 4))], r(2, 1)),
            (vec![(r(1, 5), r(0, 1)), (r(1, 5), r(4, 5))], r(5, 3)),
        ] {
            let mut sys = IFSystem::<Rational>::from_rational_coeffs(&coeffs).unwrap();
            sys.check_strong_separation(4);
            let rho = sys.rho().unwrap().clone();
            assert_eq!(rho, expect_rho);

            let mut seed = 0x0123456789ABCDEFu64;
            let mut rng = move || {
                seed ^= seed << 13;
                seed ^= seed >> 7;
                seed ^= seed << 17;
                seed
            };
            for _ in 0..1000 {
                let mut pts = Vec::new();
                for _ in 0..2 {
                    let len = (rng() % 8) as usize;
                    let word = Word((0..len).map(|_| (rng() % 2) as u8).collect());
                    let endpoint =
                        if rng() % 2 == 0 { r(0, 1) } else { r(1, 1) };
                    pts.push(sys.compose_word(&word).unwrap().apply(&endpoint));
                }
                pts.sort();
                if pts[0] == pts[1] {
                    continue;
                }
                let z = Interval::rational(pts[0].clone(), pts[1].clone());
                let jj = sys.engulf(&z, 64).unwrap();
                let cyl = sys.cylinder_hull(&jj).unwrap();
                let lhs = cyl.width();
                let rhs = &rho * &z.width();
                assert!(lhs <= rhs, "engulf bound: {lhs} ≤ {rhs}");
            }
        }
    }

    #[test]
    fn enclosure_lane_agrees_on_middle_thirds() {
        let third = Enclosure::from_rational(&r(1, 3), 64);
        let maps = vec![
            AffineMap1D::new(third.clone(), Enclosure::from_int(0, 64)).unwrap(),
            AffineMap1D::new(third, Enclosure::from_rational(&r(2, 3), 64)).unwrap(),
        ];
        let sys = IFSystem::new(maps).unwrap();
        let (lo, hi) = sys.hull().rational_outer();
        assert!(lo <= r(0, 1) && hi >= r(1, 1));
        assert!(hi <= r(1, 1) + r(1, 1000));
    }

    #[test]
    fn word_round_trip() {
        for s in ["ε", "1", "12", "2121", "(10)3"] {
            let word = Word::from_str(s).unwrap();
            let back = Word::from_str(&word.to_string()).unwrap();
            assert_eq!(word, back);
        }
        assert_eq!(w("12").count_vector(3), vec![1, 1, 0]);
        assert!(w("1").is_prefix_of(&w("12")));
        assert!(!w("2").is_prefix_of(&w("12")));
    }

    #[test]
    fn reflect_mirrors_the_attractor() {
        let sys = middle_thirds();
        let refl = sys.reflect().unwrap();
        // middle thirds is symmetric: the map set is the same, swapped
        assert_eq!(refl.maps()[0].translation, r(2, 3));
        assert_eq!(refl.maps()[1].translation, r(0, 1));

        let asym = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 4), r(0, 1)),
            (r(1, 3), r(2, 3)),
        ])
        .unwrap();
        let refl = asym.reflect().unwrap();
        assert_eq!(refl.maps()[0].translation, r(3, 4));
        assert_eq!(refl.maps()[1].translation, r(0, 1));
        assert_eq!(refl.hull().rational_outer(), (r(0, 1), r(1, 1)));
    }
}
