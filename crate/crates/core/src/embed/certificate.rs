//! Replayable emptiness certificates.
//!
//! A certificate pins the instance (both systems, the engulfing constant,
//! the search region with its justification, and all budgets), the working
//! precision, and per branch: the root cells and every excluded leaf with
//! its witness word. The subdivision tree is implicit — internal nodes are
//! exactly the strict ancestors of leaves — so checking that the leaves
//! tile the roots plus replaying every witness reproduces the claim.

use serde::{Deserialize, Serialize};

use crate::embed::cell::ParamCell;
use crate::embed::region::ParamRegion;
use crate::ifs::IfsConfig;
use crate::num::Rational;

pub use crate::embed::prune::PointSelector;

/// Which copy of the source system a branch certifies: the original
/// (positive ratios) or the reflected one (standing in for negative ratios).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Pos,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetEcho {
    pub max_depth: u32,
    pub witness_depth: u32,
    pub cover_depth: u32,
    pub max_cells: u64,
    pub endpoint_witnesses: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceHeader {
    pub x: IfsConfig,
    pub y: IfsConfig,
    pub rho: Rational,
    pub region: ParamRegion,
    pub root_level: u32,
    pub budgets: BudgetEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafCert {
    pub cell: ParamCell,
    pub witness: crate::ifs::Word,
    pub selector: PointSelector,
    pub cover_depth: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCert {
    pub branch: Branch,
    pub roots: Vec<ParamCell>,
    pub leaves: Vec<LeafCert>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: String,
    pub precision: u32,
    pub digest: String,
    pub instance: InstanceHeader,
    pub branches: Vec<BranchCert>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> crate::error::Result<Certificate> {
        serde_json::from_str(s)
            .map_err(|e| crate::error::Error::Certificate(format!("parse failure: {e}")))
    }

    pub fn leaf_count(&self) -> usize {
        self.branches.iter().map(|b| b.leaves.len()).sum()
    }
}

/// FNV-1a 64-bit digest of the canonical instance serialization.
pub fn instance_digest(header: &InstanceHeader) -> String {
    let bytes = serde_json::to_vec(header).expect("header serializes");
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}
