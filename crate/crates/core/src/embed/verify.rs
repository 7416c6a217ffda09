//! Independent certificate replay.
//!
//! Verification re-derives the search region and the root cells from the
//! instance, checks that the recorded leaves tile the roots exactly (exact
//! dyadic arithmetic), and re-evaluates every leaf's witness disjointness
//! with fresh enclosure arithmetic at the certificate's recorded precision.
//! It shares no code with the search heuristics: the image bounds below are
//! evaluated directly from the leaf data.

use std::collections::{HashMap, HashSet};

use crate::embed::cell::ParamCell;
use crate::embed::certificate::{Branch, Certificate, PointSelector};
use crate::embed::cover::{CoverRelation, CoverTable};
use crate::embed::region::{derive_root_level, derive_roots, initial_region};
use crate::error::{Error, Result};
use crate::ifs::{IFSystem, IfsConfig};
use crate::num::{Enclosure, Rational};

/// Replay a certificate against the claimed instance. `Ok(())` means every
/// structural and arithmetic check passed; any failure reports a reason.
pub fn verify_certificate(
    cert: &Certificate,
    x: &IFSystem<Rational>,
    y: &IFSystem<Rational>,
) -> Result<()> {
    verify_certificate_at(cert, x, y, cert.precision)
}

/// Replay with an explicit enclosure precision (degradation experiments).
pub fn verify_certificate_at(
    cert: &Certificate,
    x: &IFSystem<Rational>,
    y: &IFSystem<Rational>,
    prec: u32,
) -> Result<()> {
    // instance must match the systems we were asked about
    if IfsConfig::from_system(x) != cert.instance.x {
        return Err(Error::Certificate("source system differs from the instance".into()));
    }
    if IfsConfig::from_system(y) != cert.instance.y {
        return Err(Error::Certificate("target system differs from the instance".into()));
    }

    // re-derive the region and compare the recorded claims
    let orientation_only = cert.instance.region.a_ranges.len() == 1;
    let region = initial_region(x, y, orientation_only)
        .map_err(|e| Error::Certificate(format!("region re-derivation failed: {e}")))?;
    if region.rho != cert.instance.rho || region.a_ranges != cert.instance.region.a_ranges {
        return Err(Error::Certificate("recorded region does not match re-derivation".into()));
    }
    let inv_rho = Rational::one() / region.rho.clone();
    let root_level = derive_root_level(&inv_rho)
        .map_err(|e| Error::Certificate(format!("root level: {e}")))?;
    if root_level != cert.instance.root_level {
        return Err(Error::Certificate("recorded root level does not match".into()));
    }
    let expected_roots = derive_roots(&inv_rho, root_level);

    let expected_branches: usize = if orientation_only { 1 } else { 2 };
    if cert.branches.len() != expected_branches {
        return Err(Error::Certificate("wrong branch count".into()));
    }

    let mut cover_cache: HashMap<u32, CoverTable> = HashMap::new();
    for branch_cert in &cert.branches {
        if branch_cert.roots != expected_roots {
            return Err(Error::Certificate("root cells do not match re-derivation".into()));
        }
        let branch_x = match branch_cert.branch {
            Branch::Pos => x.clone(),
            Branch::Neg => x
                .reflect()
                .map_err(|e| Error::Certificate(format!("reflection failed: {e}")))?,
        };
        verify_tiling(&expected_roots, branch_cert.leaves.iter().map(|l| &l.cell))?;
        for leaf in &branch_cert.leaves {
            if !leaf.cell.is_precompact() {
                return Err(Error::Certificate("leaf touches the singular line".into()));
            }
            let cover = match cover_cache.entry(leaf.cover_depth) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(CoverTable::build(y, leaf.cover_depth)?)
                }
            };
            replay_leaf(&branch_x, leaf.cell, &leaf.witness, leaf.selector, cover, prec)?;
        }
    }
    Ok(())
}

/// Exact tiling check: every leaf descends from a root, no leaf contains
/// another, and the leaf areas sum to the root areas.
fn verify_tiling<'a>(
    roots: &[ParamCell],
    leaves: impl Iterator<Item = &'a ParamCell>,
) -> Result<()> {
    let root_level = roots.first().map(|r| r.level).unwrap_or(0);
    let root_set: HashSet<(i64, i64)> = roots.iter().map(|r| (r.ka, r.kb)).collect();
    let mut leaf_set: HashSet<(u32, i64, i64)> = HashSet::new();
    let mut area = Rational::zero();
    for leaf in leaves {
        if leaf.level < root_level {
            return Err(Error::Certificate("leaf above the root level".into()));
        }
        let shift = leaf.level - root_level;
        if !root_set.contains(&(leaf.ka >> shift, leaf.kb >> shift)) {
            return Err(Error::Certificate("leaf outside every root".into()));
        }
        if !leaf_set.insert((leaf.level, leaf.ka, leaf.kb)) {
            return Err(Error::Certificate("duplicate leaf".into()));
        }
        area = &area + &leaf.area();
    }
    // nesting check: no strict ancestor of a leaf is itself a leaf
    for &(level, ka, kb) in &leaf_set {
        let mut l = level;
        let (mut a, mut b) = (ka, kb);
        while l > root_level {
            l -= 1;
            a >>= 1;
            b >>= 1;
            if leaf_set.contains(&(l, a, b)) {
                return Err(Error::Certificate("nested leaves".into()));
            }
        }
    }
    let root_area = roots
        .iter()
        .fold(Rational::zero(), |acc, r| &acc + &r.area());
    if area != root_area {
        return Err(Error::Certificate(format!(
            "leaves tile area {area}, roots have {root_area}"
        )));
    }
    Ok(())
}

/// Re-evaluate one leaf's exclusion claim from scratch.
fn replay_leaf(
    branch_x: &IFSystem<Rational>,
    cell: ParamCell,
    witness: &crate::ifs::Word,
    selector: PointSelector,
    cover: &CoverTable,
    prec: u32,
) -> Result<()> {
    let composed = branch_x
        .compose_word(witness)
        .map_err(|e| Error::Certificate(format!("witness word invalid: {e}")))?;
    // witness point: φ_w(0) = translation, φ_w(1) = translation + ratio
    let point = match selector {
        PointSelector::Zero => composed.translation.clone(),
        PointSelector::One => &composed.translation + &composed.ratio,
    };
    let a = cell.a_range();
    let b = cell.b_range();
    let pe = Enclosure::from_rational(&point, prec);
    let a_enc = Enclosure::from_rational_interval(&a.lo, &a.hi, prec)
        .map_err(|e| Error::Certificate(e.to_string()))?;
    let b_enc = Enclosure::from_rational_interval(&b.lo, &b.hi, prec)
        .map_err(|e| Error::Certificate(e.to_string()))?;
    let image = Enclosure::affine(&a_enc, &b_enc, &pe);
    let lo = image.lo_rational();
    let hi = image.hi_rational();
    if cover.classify(&lo, &hi) != CoverRelation::Disjoint {
        return Err(Error::Certificate(format!(
            "leaf ({}, {}, {}) witness {witness} image [{lo}, {hi}] is not disjoint \
             from the depth-{} cover",
            cell.level, cell.ka, cell.kb, cover.depth
        )));
    }
    Ok(())
}
