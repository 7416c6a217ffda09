//! Cell exclusion by cylinder witness points.
//!
//! A parameter cell `D = A × B` is excluded once some word `w` over the
//! source system satisfies: the enclosure of `{a·σ_w + b : (a,b) ∈ D}` is
//! disjoint from the cylinder cover of the target, where `σ_w = φ_w(0)` is
//! a point of `X`. Every `f ∈ D` then maps the point `σ_w ∈ X` outside
//! `Y`, so `D ∩ ℰ = ∅`.
//!
//! The search walks the source cylinder tree. At each node the image of the
//! whole cylinder hull is classified against the cover: disjoint proves the
//! exclusion (the witness point's image is inside the hull image);
//! containment in a single cover component kills the subtree (no descendant
//! image can escape); straddling recurses, visiting children farther from
//! the cover first.
//!
//! Navigation runs in outward-rounded f64 interval arithmetic (sound but
//! coarse); any exclusion it proposes is confirmed with exact enclosure
//! arithmetic at the working precision before being reported, so recorded
//! witnesses always replay.

use serde::{Deserialize, Serialize};

use crate::embed::cover::{rational_f64_down, rational_f64_up, CoverRelation, CoverTable};
use crate::ifs::{AffineMap1D, IFSystem, Word};
use crate::num::{Enclosure, Rational};

/// Which witness point of the cylinder `w` a leaf records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointSelector {
    /// `φ_w(0)`, the image of the hull's left endpoint.
    Zero,
    /// `φ_w(1)`, the image of the hull's right endpoint (flag-enabled).
    One,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PruneOutcome {
    /// Excluded with the recorded witness.
    Pruned { witness: Word, selector: PointSelector },
    /// Not excluded within the witness budget.
    Live,
}

/// Closed f64 interval with outward rounding; a sound outer bound of the
/// exact quantity it tracks.
#[derive(Debug, Clone, Copy)]
struct FInt {
    lo: f64,
    hi: f64,
}

impl FInt {
    fn from_rational(q: &Rational) -> FInt {
        FInt { lo: rational_f64_down(q), hi: rational_f64_up(q) }
    }

    fn add(self, o: FInt) -> FInt {
        FInt { lo: (self.lo + o.lo).next_down(), hi: (self.hi + o.hi).next_up() }
    }

    /// Product of outer bounds of non-negative quantities; directed nudges
    /// may have pushed a lower bound a hair below zero, so inputs are
    /// clamped (still outer bounds for non-negative values).
    fn mul_nonneg(self, o: FInt) -> FInt {
        let (a, b) = (self.lo.max(0.0), o.lo.max(0.0));
        FInt { lo: (a * b).next_down().max(0.0), hi: (self.hi * o.hi).next_up() }
    }

    fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Immutable source-side data shared by every cell of one branch.
pub struct XWitnessContext {
    maps: Vec<AffineMap1D<Rational>>,
    maps_f: Vec<(FInt, FInt)>,
}

impl XWitnessContext {
    pub fn new(x: &IFSystem<Rational>) -> Self {
        let maps = x.maps().to_vec();
        let maps_f = maps
            .iter()
            .map(|m| (FInt::from_rational(&m.ratio), FInt::from_rational(&m.translation)))
            .collect();
        XWitnessContext { maps, maps_f }
    }

    pub fn arity(&self) -> usize {
        self.maps.len()
    }
}

/// Exact confirmation of a proposed witness: the enclosure of the witness
/// point's image over the cell must be disjoint from the exact cover. This
/// is the same check certificate replay performs.
#[allow(clippy::too_many_arguments)]
fn confirm_exact(
    ctx: &XWitnessContext,
    word: &Word,
    selector: PointSelector,
    a_lo: &Rational,
    a_hi: &Rational,
    b_lo: &Rational,
    b_hi: &Rational,
    cover: &CoverTable,
    prec: u32,
) -> bool {
    let mut composed = AffineMap1D::identity();
    for &s in &word.0 {
        composed = composed.compose(&ctx.maps[s as usize]);
    }
    let point = match selector {
        PointSelector::Zero => composed.translation.clone(),
        PointSelector::One => &composed.translation + &composed.ratio,
    };
    let a = Enclosure::from_rational_interval(a_lo, a_hi, prec).expect("ordered");
    let b = Enclosure::from_rational_interval(b_lo, b_hi, prec).expect("ordered");
    let image = Enclosure::affine(&a, &b, &Enclosure::from_rational(&point, prec));
    cover.classify(&image.lo_rational(), &image.hi_rational()) == CoverRelation::Disjoint
}

/// Try to exclude one pre-compact cell.
///
/// `a_lo..b_hi` are the cell's closed sides (positive `a`); `witness_depth`
/// caps the word length; `use_endpoint_witnesses` also probes `φ_w(1)`.
#[allow(clippy::too_many_arguments)]
pub fn prune_cell(
    ctx: &XWitnessContext,
    a_lo: &Rational,
    a_hi: &Rational,
    b_lo: &Rational,
    b_hi: &Rational,
    cover: &CoverTable,
    witness_depth: u32,
    use_endpoint_witnesses: bool,
    prec: u32,
) -> PruneOutcome {
    debug_assert!(a_lo.is_positive());
    let a = FInt { lo: rational_f64_down(a_lo), hi: rational_f64_up(a_hi) };
    let b = FInt { lo: rational_f64_down(b_lo), hi: rational_f64_up(b_hi) };
    let confirm = |word: &Word, selector: PointSelector| {
        confirm_exact(ctx, word, selector, a_lo, a_hi, b_lo, b_hi, cover, prec)
    };

    // stack of (word, cylinder ratio, cylinder left endpoint), f64 bounds
    let one = FInt { lo: 1.0, hi: 1.0 };
    let zero = FInt { lo: 0.0, hi: 0.0 };
    let mut stack: Vec<(Word, FInt, FInt)> = vec![(Word::empty(), one, zero)];
    while let Some((word, ratio, trans)) = stack.pop() {
        // hull of φ_w([0,1]) = [trans, trans + ratio]
        let t1 = trans.add(ratio);
        let img_lo = a.mul_nonneg(FInt { lo: trans.lo, hi: trans.lo }).add(b);
        let img_hi = a.mul_nonneg(FInt { lo: t1.hi, hi: t1.hi }).add(b);
        match cover.classify_f64(img_lo.lo, img_hi.hi) {
            CoverRelation::Disjoint => {
                if confirm(&word, PointSelector::Zero) {
                    return PruneOutcome::Pruned { witness: word, selector: PointSelector::Zero };
                }
                // f64 bound too coarse at this node; fall through and recurse
            }
            CoverRelation::ContainedInOne => {
                // no descendant image can leave this component
                continue;
            }
            CoverRelation::Straddles => {}
        }
        // point probes at this node
        let pt = a.mul_nonneg(trans).add(b);
        if cover.classify_f64(pt.lo, pt.hi) == CoverRelation::Disjoint
            && confirm(&word, PointSelector::Zero)
        {
            return PruneOutcome::Pruned { witness: word, selector: PointSelector::Zero };
        }
        if use_endpoint_witnesses {
            let qt = a.mul_nonneg(t1).add(b);
            if cover.classify_f64(qt.lo, qt.hi) == CoverRelation::Disjoint
                && confirm(&word, PointSelector::One)
            {
                return PruneOutcome::Pruned { witness: word, selector: PointSelector::One };
            }
        }
        if word.len() as u32 >= witness_depth {
            continue;
        }
        // explore children farther from the cover first
        let a_mid = a.mid();
        let b_mid = b.mid();
        let mut kids: Vec<(f64, usize, FInt, FInt)> = Vec::with_capacity(ctx.maps_f.len());
        for (i, (ri, ti)) in ctx.maps_f.iter().enumerate() {
            // φ_w ∘ φ_i: ratio·r_i, ratio·t_i + trans
            let child_ratio = ratio.mul_nonneg(*ri);
            let child_trans = ratio.mul_nonneg(*ti).add(trans);
            let mid = child_trans.mid() + 0.5 * child_ratio.mid();
            let dist = cover.distance_f64(a_mid * mid + b_mid);
            kids.push((dist, i, child_ratio, child_trans));
        }
        // nearest last so the farthest pops first; index tie-break
        kids.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(y.1.cmp(&x.1)));
        for (_, i, cr, ct) in kids {
            let mut w = word.clone();
            w.push(i as u8);
            stack.push((w, cr, ct));
        }
    }
    PruneOutcome::Live
}
