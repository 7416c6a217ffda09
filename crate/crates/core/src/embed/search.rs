//! Candidate embedding enumeration and finite-depth verification.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::embed::certify::SurvivorSet;
use crate::embed::cover::{CoverRelation, CoverTable};
use crate::error::{Error, Result};
use crate::ifs::{AffineMap1D, IFSystem, Interval, Word};
use crate::num::Rational;

/// Status of one candidate map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EmbedStatus {
    /// Every cylinder hull of `f(X)` up to the given depth lies inside a
    /// single component of a comparably fine cylinder cover of `Y`. A
    /// finite-resolution statement, not a proof of membership in `ℰ`.
    VerifiedToDepth(u32),
    /// A concrete point of `X` provably maps outside `Y`.
    Refuted {
        word: Word,
        point: Rational,
        image: Rational,
        cover_depth: u32,
    },
}

impl EmbedStatus {
    pub fn is_verified_to(&self, depth: u32) -> bool {
        matches!(self, EmbedStatus::VerifiedToDepth(d) if *d >= depth)
    }
}

/// Cover depth whose cylinders are no larger than the candidate's image
/// cylinders at source depth `d`.
fn matched_cover_depth(
    f_norm: &Rational,
    alpha_min: &Rational,
    beta_max: &Rational,
    d: u32,
    cap: u32,
) -> u32 {
    let target = f_norm * &alpha_min.pow(d as i32).expect("positive power");
    let mut n = 1u32;
    let mut power = beta_max.clone();
    while power > target && n < cap {
        power = &power * beta_max;
        n += 1;
    }
    n
}

/// Finite-depth verification of `f(X) ⊆ Y`.
///
/// For each depth `d ≤ verify_depth` the images of all depth-`d` cylinder
/// hulls are tested for containment in single components of the matched
/// cover. On a containment failure the offending cylinder is searched for a
/// point witness (`φ_w(0)` and `φ_w(1)` both lie in `X`); a witness outside
/// the cover refutes the embedding outright.
pub fn verify_map(
    f: &AffineMap1D<Rational>,
    x: &IFSystem<Rational>,
    y: &IFSystem<Rational>,
    verify_depth: u32,
) -> Result<EmbedStatus> {
    if !x.is_normalized() || !y.is_normalized() {
        return Err(Error::Invalid("both systems must be normalized".into()));
    }
    let alpha_min = x
        .maps()
        .iter()
        .map(|m| m.norm())
        .min_by(|p, q| p.cmp_rat(q))
        .expect("nonempty");
    let beta_max = y
        .maps()
        .iter()
        .map(|m| m.norm())
        .max_by(|p, q| p.cmp_rat(q))
        .expect("nonempty");
    let f_norm = f.norm();
    let cover_cap = (20.0 / (y.len() as f64).log2()) as u32;
    let mut covers: HashMap<u32, CoverTable> = HashMap::new();

    let mut verified = 0u32;
    for d in 1..=verify_depth {
        let n = matched_cover_depth(&f_norm, &alpha_min, &beta_max, d, cover_cap);
        if let std::collections::hash_map::Entry::Vacant(e) = covers.entry(n) {
            e.insert(CoverTable::build(y, n)?);
        }
        let cover = &covers[&n];
        let mut all_contained = true;
        // depth-d cylinders, enumerated with an explicit stack
        let mut stack: Vec<(Word, AffineMap1D<Rational>)> =
            vec![(Word::empty(), AffineMap1D::identity())];
        while let Some((word, map)) = stack.pop() {
            if word.len() as u32 == d {
                let hull = f.apply_interval(&map.apply_interval(&Interval::unit()));
                match cover.classify(&hull.lo, &hull.hi) {
                    CoverRelation::ContainedInOne => {}
                    _ => {
                        all_contained = false;
                        if let Some(refuted) =
                            hunt_refutation(f, x, cover, &word, &map, verify_depth)
                        {
                            return Ok(refuted);
                        }
                    }
                }
                continue;
            }
            for (i, m) in x.maps().iter().enumerate() {
                let mut w = word.clone();
                w.push(i as u8);
                stack.push((w, map.compose(m)));
            }
        }
        if all_contained {
            verified = d;
        }
    }
    Ok(EmbedStatus::VerifiedToDepth(verified))
}

/// Search below a failing cylinder for a point of `X` that provably maps
/// outside the cover.
fn hunt_refutation(
    f: &AffineMap1D<Rational>,
    x: &IFSystem<Rational>,
    cover: &CoverTable,
    word: &Word,
    map: &AffineMap1D<Rational>,
    depth_cap: u32,
) -> Option<EmbedStatus> {
    let mut stack = vec![(word.clone(), map.clone())];
    while let Some((w, m)) = stack.pop() {
        // hull endpoints are attractor points: φ_w(0) and φ_w(1)
        for point in [m.translation.clone(), &m.translation + &m.ratio] {
            let image = f.apply(&point);
            if !cover.contains_point(&image) {
                return Some(EmbedStatus::Refuted {
                    word: w,
                    point,
                    image,
                    cover_depth: cover.depth,
                });
            }
        }
        let hull = f.apply_interval(&m.apply_interval(&Interval::unit()));
        match cover.classify(&hull.lo, &hull.hi) {
            CoverRelation::ContainedInOne => continue,
            _ => {
                if (w.len() as u32) < depth_cap + 4 {
                    for (i, child) in x.maps().iter().enumerate() {
                        let mut cw = w.clone();
                        cw.push(i as u8);
                        stack.push((cw, m.compose(child)));
                    }
                }
            }
        }
    }
    None
}

/// Enumerate candidate embeddings (compositions `ψ_jj ∘ φ_ii` over both
/// systems' words, plus surviving-cell centers when a survivor set is
/// supplied) and classify each with [`verify_map`].
pub fn search_embeddings(
    x: &IFSystem<Rational>,
    y: &IFSystem<Rational>,
    candidate_depth: u32,
    verify_depth: u32,
    survivors: Option<&SurvivorSet>,
) -> Result<Vec<(AffineMap1D<Rational>, EmbedStatus)>> {
    let mut candidates: Vec<AffineMap1D<Rational>> = Vec::new();
    let x_words = all_words(x.len(), candidate_depth);
    let y_words = all_words(y.len(), candidate_depth);
    for jj in &y_words {
        let psi = y.compose_word(jj)?;
        for ii in &x_words {
            let phi = x.compose_word(ii)?;
            candidates.push(psi.compose(&phi));
        }
    }
    if let Some(s) = survivors {
        for (branch, cell) in s.cells.iter().take(256) {
            let (a, b) = cell.center();
            if a.is_zero() {
                continue;
            }
            let map = match branch {
                crate::embed::certificate::Branch::Pos => {
                    AffineMap1D { ratio: a, translation: b }
                }
                crate::embed::certificate::Branch::Neg => {
                    AffineMap1D { ratio: -a.clone(), translation: &a + &b }
                }
            };
            candidates.push(map);
        }
    }
    candidates.sort_by(|p, q| {
        (p.ratio.clone(), p.translation.clone())
            .cmp(&(q.ratio.clone(), q.translation.clone()))
    });
    candidates.dedup();
    let mut out = Vec::with_capacity(candidates.len());
    for c in candidates {
        let status = verify_map(&c, x, y, verify_depth)?;
        out.push((c, status));
    }
    Ok(out)
}

fn all_words(arity: usize, max_len: u32) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut level = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(level.len() * arity);
        for w in &level {
            for i in 0..arity {
                let mut v = w.clone();
                v.push(i as u8);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
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
    fn identity_and_cylinder_maps_verify() {
        let x = middle_thirds();
        let id = AffineMap1D { ratio: r(1, 1), translation: r(0, 1) };
        assert!(verify_map(&id, &x, &x, 8).unwrap().is_verified_to(8));

        let phi2 = AffineMap1D { ratio: r(1, 3), translation: r(2, 3) };
        assert!(verify_map(&phi2, &x, &x, 8).unwrap().is_verified_to(8));
    }

    #[test]
    fn half_scale_map_is_refuted() {
        let x = middle_thirds();
        let f = AffineMap1D { ratio: r(1, 2), translation: r(0, 1) };
        match verify_map(&f, &x, &x, 8).unwrap() {
            EmbedStatus::Refuted { image, .. } => {
                // f maps some attractor point into the central gap
                assert!(image > r(1, 3) && image < r(2, 3), "image {image}");
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn orientation_reversing_self_embedding_verifies() {
        // x ↦ -x/3 + 1/3 maps the middle-thirds set into itself (the set is
        // symmetric, and this is φ₁ composed with the reflection)
        let x = middle_thirds();
        let f = AffineMap1D { ratio: r(-1, 3), translation: r(1, 3) };
        assert!(verify_map(&f, &x, &x, 6).unwrap().is_verified_to(6));
    }

    #[test]
    fn search_finds_cylinder_embeddings() {
        let x = middle_thirds();
        let found = search_embeddings(&x, &x, 2, 6, None).unwrap();
        let verified: Vec<&AffineMap1D<Rational>> = found
            .iter()
            .filter(|(_, s)| s.is_verified_to(6))
            .map(|(m, _)| m)
            .collect();
        // contains the identity and both first-level maps
        assert!(verified.iter().any(|m| m.ratio == r(1, 1) && m.translation == r(0, 1)));
        assert!(verified.iter().any(|m| m.ratio == r(1, 3) && m.translation == r(0, 1)));
        assert!(verified.iter().any(|m| m.ratio == r(1, 3) && m.translation == r(2, 3)));
        // every candidate is classified, none misclassified as refuted
        for (m, s) in &found {
            if m.ratio == r(1, 9) && m.translation == r(2, 9) {
                assert!(s.is_verified_to(6));
            }
        }
    }

    #[test]
    fn cross_system_candidates_are_refuted() {
        let x = middle_thirds();
        let y = IFSystem::<Rational>::from_rational_coeffs(&[
            (r(1, 4), r(0, 1)),
            (r(1, 4), r(3, 4)),
        ])
        .unwrap();
        let found = search_embeddings(&x, &y, 2, 6, None).unwrap();
        for (m, s) in &found {
            assert!(
                !s.is_verified_to(3),
                "map ({}, {}) unexpectedly verifies",
                m.ratio,
                m.translation
            );
        }
    }
}
