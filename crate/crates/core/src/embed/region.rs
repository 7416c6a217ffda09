//! The compact search region for embedding parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{IFSystem, Interval};
use crate::num::Rational;

/// Sign-definite parameter band(s): `|a| ∈ [1/ρ, 1]`, `b ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRegion {
    /// One or two sign-definite ranges for `a`, each excluding zero.
    pub a_ranges: Vec<Interval<Rational>>,
    pub b_range: Interval<Rational>,
    /// The engulfing constant used in the norm reduction.
    pub rho: Rational,
    /// Human-readable justification chain, recorded into certificates.
    pub justification: Vec<String>,
}

/// Derive the search region for `ℰ(X,Y)`.
///
/// For any embedding `f`: `b = f(0) ∈ Y ⊆ [0,1]` since `0 ∈ X`; and
/// `‖f‖ = diam f(X) ≤ diam Y = 1`. If `0 < ‖f‖ < 1/ρ`, the image `f(X)` is
/// a subset of `Y` of diameter `‖f‖`, so the minimal engulfing cylinder
/// `ψ_w(Y) ⊇ f(X)` has `β_w ≤ ρ·‖f‖`, and `g = ψ_w⁻¹ ∘ f` is an embedding
/// with `‖g‖ = ‖f‖/β_w ≥ 1/ρ`. Hence `ℰ = ∅` iff there is no embedding
/// with `1/ρ ≤ |a| ≤ 1`, and the band suffices for emptiness certification.
pub fn initial_region(
    x: &IFSystem<Rational>,
    y: &IFSystem<Rational>,
    orientation_preserving_only: bool,
) -> Result<ParamRegion> {
    if !x.is_normalized() || !y.is_normalized() {
        return Err(Error::Invalid("both systems must be normalized".into()));
    }
    if !x.separation().is_certified() || !y.separation().is_certified() {
        return Err(Error::NotSeparated(
            "certify strong separation of both systems first".into(),
        ));
    }
    let rho = y.rho()?.clone();
    let inv_rho = Rational::one() / rho.clone();
    let pos = Interval::rational(inv_rho.clone(), Rational::one());
    let mut a_ranges = vec![pos];
    if !orientation_preserving_only {
        a_ranges.push(Interval::rational(-Rational::one(), -inv_rho.clone()));
    }
    let justification = vec![
        "b = f(0) lies in Y ⊆ [0,1] because 0 ∈ X".to_string(),
        "|a| = diam f(X) ≤ diam Y = 1".to_string(),
        format!(
            "if 0 < |a| < 1/ρ = {inv_rho}, the minimal engulfing cylinder ψ_w(Y) ⊇ f(X) \
             has β_w ≤ ρ|a|, so ψ_w⁻¹∘f is an embedding with norm in [1/ρ, 1]; \
             emptiness on the band therefore implies emptiness everywhere"
        ),
        "negative ratios are searched as positive ratios against the reflected source system"
            .to_string(),
    ];
    Ok(ParamRegion {
        a_ranges,
        b_range: Interval::rational(Rational::zero(), Rational::one()),
        rho,
        justification,
    })
}

/// Smallest dyadic level whose cells are fine enough that no root cell
/// touching the band `[1/ρ, 1]` also touches `a = 0`.
pub(crate) fn derive_root_level(inv_rho: &Rational) -> Result<u32> {
    let mut l = 2u32;
    loop {
        let scale = Rational::from_bigint(num_bigint::BigInt::from(1) << l as usize);
        if &scale * inv_rho > Rational::one() {
            return Ok(l);
        }
        l += 1;
        if l > 24 {
            return Err(Error::Invalid("engulfing constant too large".into()));
        }
    }
}

/// All closed level-`root_level` cells meeting `[1/ρ, 1] × [0, 1]`, in
/// canonical order. Every cell is pre-compact by the choice of level.
pub(crate) fn derive_roots(
    inv_rho: &Rational,
    root_level: u32,
) -> Vec<crate::embed::cell::ParamCell> {
    use crate::embed::cell::ParamCell;
    use num_traits::ToPrimitive;
    let scale = Rational::from_bigint(num_bigint::BigInt::from(1) << root_level as usize);
    let ka_min = (&scale * inv_rho).ceil_int().to_i64().expect("root level fits") - 1;
    let ka_max = scale.floor_int().to_i64().expect("root level fits");
    let kb_min = -1i64;
    let kb_max = scale.floor_int().to_i64().expect("root level fits");
    assert!(ka_min >= 1, "root level must keep cells away from a = 0");
    let mut cells = Vec::new();
    for ka in ka_min..=ka_max {
        for kb in kb_min..=kb_max {
            cells.push(ParamCell { level: root_level, ka, kb });
        }
    }
    cells
}
