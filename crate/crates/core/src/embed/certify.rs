//! Breadth-first subdivision driver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;

use crate::embed::cell::{pow2_inv, ParamCell};
use crate::embed::certificate::{
    instance_digest, Branch, BranchCert, BudgetEcho, Certificate, InstanceHeader, LeafCert,
};
use crate::embed::cover::CoverTable;
use crate::embed::prune::{prune_cell, PruneOutcome, XWitnessContext};
use crate::embed::region::{derive_root_level, derive_roots, initial_region};
use crate::embed::search::{verify_map, EmbedStatus};
use crate::error::{Error, Result};
use crate::ifs::{AffineMap1D, IFSystem};
use crate::num::{default_precision, Rational};

/// Budgets for one certification run. All depths are absolute dyadic levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyBudget {
    /// Deepest subdivision level of parameter cells.
    pub max_depth: u32,
    /// Longest witness word over the source system.
    pub witness_depth: u32,
    /// Deepest cylinder cover of the target system.
    pub cover_depth: u32,
    /// Total number of cells processed before giving up.
    pub max_cells: u64,
    /// Also probe `φ_w(1)` as a witness point.
    pub endpoint_witnesses: bool,
    /// Restrict the search to orientation-preserving embeddings.
    pub orientation_preserving_only: bool,
    /// When set, surviving cells are probed for a verified embedding to the
    /// given depth and a hit upgrades the outcome.
    pub candidate_verify_depth: Option<u32>,
}

impl Default for CertifyBudget {
    fn default() -> Self {
        CertifyBudget {
            max_depth: 24,
            witness_depth: 12,
            cover_depth: 16,
            max_cells: 400_000,
            endpoint_witnesses: false,
            orientation_preserving_only: false,
            candidate_verify_depth: None,
        }
    }
}

/// Everything still unexcluded after a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivorSet {
    pub rho: Rational,
    pub inv_rho: Rational,
    /// Surviving cells in canonical order (positive-band coordinates; `Neg`
    /// cells refer to the reflected source system).
    pub cells: Vec<(Branch, ParamCell)>,
    /// Cells excluded along the way, with their witnesses (soundness
    /// audits replay these against known embeddings).
    pub pruned: Vec<(Branch, LeafCert)>,
    pub total_area: Rational,
    pub budget_exhausted: bool,
    pub orientation_preserving_only: bool,
}

impl SurvivorSet {
    /// Whether the not-yet-excluded parameter region contains `(a, b)`.
    ///
    /// The region is the union of the surviving cells and the unexplored
    /// low-norm band `0 < |a| < 1/ρ` (whose emptiness would only follow
    /// from emptiness of the band, which this run did not establish).
    /// Points with `b = f(0)` outside `[0,1]` are excluded outright.
    pub fn contains_param(&self, a: &Rational, b: &Rational) -> bool {
        if a.is_zero() || b.is_negative() || *b > Rational::one() {
            return false;
        }
        if a.abs() < self.inv_rho {
            return true;
        }
        if a.is_positive() {
            self.cells
                .iter()
                .any(|(br, c)| *br == Branch::Pos && c.contains(a, b))
        } else {
            if self.orientation_preserving_only {
                return false;
            }
            // f(x) = a·x + b with a < 0 corresponds to g = (−a, a + b) on
            // the reflected source system
            let ga = -a;
            let gb = a + b;
            self.cells
                .iter()
                .any(|(br, c)| *br == Branch::Neg && c.contains(&ga, &gb))
        }
    }

    /// Least upper bound for `|a|` over survivors meeting the given closed
    /// box, clamped to the box; `None` when no survivor meets it.
    pub fn sup_a_within(
        &self,
        branch: Branch,
        a_lo: &Rational,
        a_hi: &Rational,
        b_lo: &Rational,
        b_hi: &Rational,
    ) -> Option<Rational> {
        let mut best: Option<Rational> = None;
        for (br, c) in &self.cells {
            if *br != branch {
                continue;
            }
            let ar = c.a_range();
            let brange = c.b_range();
            let disjoint =
                &ar.hi < a_lo || a_hi < &ar.lo || &brange.hi < b_lo || b_hi < &brange.lo;
            if disjoint {
                continue;
            }
            let cand = ar.hi.min(a_hi.clone());
            best = Some(match best {
                None => cand,
                Some(cur) => cur.max(cand),
            });
        }
        best
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: u32,
    pub cells_in: u64,
    pub pruned: u64,
    pub live_out: u64,
    /// Total area of live cells after pruning this level.
    pub area_after: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub root_level: u32,
    pub levels: Vec<LevelRow>,
    pub processed_cells: u64,
    pub budget_exhausted: bool,
    pub precision: u32,
}

/// Outcome of a certification run.
#[derive(Debug, Clone)]
pub enum CertifyOutcome {
    /// Every leaf excluded; the certificate replays the claim `ℰ = ∅`.
    Empty(Box<Certificate>),
    /// Cells survive (or the budget ran out); never a wrong answer.
    Unknown(Box<SurvivorSet>),
    /// A surviving parameter passed embedding verification.
    NonemptyCandidate {
        map: AffineMap1D<Rational>,
        verified_depth: u32,
        survivors: Box<SurvivorSet>,
    },
}

impl CertifyOutcome {
    pub fn is_empty_certified(&self) -> bool {
        matches!(self, CertifyOutcome::Empty(_))
    }
}

/// Sound breadth-first emptiness certification for `ℰ(X,Y)`.
///
/// Requires both systems normalized with certified strong separation. The
/// result is `Empty` only when every dyadic leaf of the (possibly
/// two-branch) subdivision carries a replay-checkable exclusion witness;
/// budget exhaustion yields `Unknown`, never a wrong answer.
pub fn certify_empty(
    x: &IFSystem<Rational>,
    y: &IFSystem<Rational>,
    budget: &CertifyBudget,
) -> Result<(CertifyOutcome, RunReport)> {
    let region = initial_region(x, y, budget.orientation_preserving_only)?;
    let rho = region.rho.clone();
    let inv_rho = Rational::one() / rho.clone();
    let prec = default_precision();
    let root_level = derive_root_level(&inv_rho)?;
    if budget.max_depth < root_level {
        return Err(Error::Invalid(format!(
            "max_depth {} is above the root level {root_level}",
            budget.max_depth
        )));
    }

    let mut branches: Vec<(Branch, IFSystem<Rational>)> = vec![(Branch::Pos, x.clone())];
    if !budget.orientation_preserving_only {
        branches.push((Branch::Neg, x.reflect()?));
    }

    // cover tables for every level's tuned depth: the finest usable gaps at
    // cell size 2^-level appear once max cylinder diameter drops below it
    let beta_max = y
        .maps()
        .iter()
        .map(|m| m.norm())
        .max_by(|p, q| p.cmp_rat(q))
        .expect("nonempty system");
    let size_cap = (18.0 / (y.len() as f64).log2()) as u32;
    let cover_depth_for = |level: u32| -> u32 {
        let mut n = 1u32;
        let target = pow2_inv(level);
        let mut power = beta_max.clone();
        while power > target && n < budget.cover_depth && n < size_cap {
            power = &power * &beta_max;
            n += 1;
        }
        n
    };
    let mut covers: HashMap<u32, Arc<CoverTable>> = HashMap::new();
    for level in root_level..=budget.max_depth {
        let n = cover_depth_for(level);
        if let std::collections::hash_map::Entry::Vacant(e) = covers.entry(n) {
            e.insert(Arc::new(CoverTable::build(y, n)?));
        }
    }

    // root cells (identical for both branches: the positive-band
    // representation covers negative ratios through the reflected system)
    let roots: Vec<ParamCell> = derive_roots(&inv_rho, root_level);

    let contexts: Vec<(Branch, XWitnessContext)> = branches
        .iter()
        .map(|(br, sys)| (*br, XWitnessContext::new(sys)))
        .collect();

    let mut live: Vec<(usize, ParamCell)> = Vec::new();
    for (bi, _) in branches.iter().enumerate() {
        for c in &roots {
            live.push((bi, *c));
        }
    }

    let mut leaves: Vec<Vec<LeafCert>> = vec![Vec::new(); branches.len()];
    let mut report = RunReport {
        root_level,
        levels: Vec::new(),
        processed_cells: 0,
        budget_exhausted: false,
        precision: prec,
    };

    let mut level = root_level;
    loop {
        if live.is_empty() {
            break;
        }
        if report.processed_cells + live.len() as u64 > budget.max_cells {
            report.budget_exhausted = true;
            break;
        }
        let n = cover_depth_for(level);
        let cover = covers.get(&n).expect("cover precomputed").clone();
        let witness_depth = budget.witness_depth;
        let endpoint = budget.endpoint_witnesses;

        let outcomes: Vec<PruneOutcome> = live
            .par_iter()
            .map(|(bi, cell)| {
                let a = cell.a_range();
                let b = cell.b_range();
                prune_cell(
                    &contexts[*bi].1,
                    &a.lo,
                    &a.hi,
                    &b.lo,
                    &b.hi,
                    &cover,
                    witness_depth,
                    endpoint,
                    prec,
                )
            })
            .collect();

        report.processed_cells += live.len() as u64;
        let mut next: Vec<(usize, ParamCell)> = Vec::new();
        let mut pruned_count = 0u64;
        for ((bi, cell), outcome) in live.iter().zip(outcomes) {
            match outcome {
                PruneOutcome::Pruned { witness, selector } => {
                    pruned_count += 1;
                    leaves[*bi].push(LeafCert {
                        cell: *cell,
                        witness,
                        selector,
                        cover_depth: n,
                    });
                }
                PruneOutcome::Live => {
                    if level < budget.max_depth {
                        next.extend(cell.children().map(|ch| (*bi, ch)));
                    } else {
                        next.push((*bi, *cell));
                    }
                }
            }
        }
        let survivors_at_cap = level >= budget.max_depth;
        let live_out = next.len() as u64;
        let cell_area = {
            let s = pow2_inv(if survivors_at_cap { level } else { level + 1 });
            &s * &s
        };
        report.levels.push(LevelRow {
            level,
            cells_in: live.len() as u64,
            pruned: pruned_count,
            live_out,
            area_after: &Rational::from_int(live_out as i64) * &cell_area,
        });
        live = next;
        if survivors_at_cap {
            break;
        }
        level += 1;
    }

    if live.is_empty() && !report.budget_exhausted {
        let budgets = BudgetEcho {
            max_depth: budget.max_depth,
            witness_depth: budget.witness_depth,
            cover_depth: budget.cover_depth,
            max_cells: budget.max_cells,
            endpoint_witnesses: budget.endpoint_witnesses,
        };
        let instance = InstanceHeader {
            x: crate::ifs::IfsConfig::from_system(x),
            y: crate::ifs::IfsConfig::from_system(y),
            rho,
            region,
            root_level,
            budgets,
        };
        let digest = instance_digest(&instance);
        let cert = Certificate {
            version: env!("CARGO_PKG_VERSION").to_string(),
            precision: prec,
            digest,
            instance,
            branches: branches
                .iter()
                .enumerate()
                .map(|(bi, (br, _))| BranchCert {
                    branch: *br,
                    roots: roots.clone(),
                    leaves: std::mem::take(&mut leaves[bi]),
                })
                .collect(),
        };
        return Ok((CertifyOutcome::Empty(Box::new(cert)), report));
    }

    let total_area = live
        .iter()
        .fold(Rational::zero(), |acc, (_, c)| &acc + &c.area());
    let mut pruned_leaves = Vec::new();
    for (bi, (br, _)) in branches.iter().enumerate() {
        for leaf in std::mem::take(&mut leaves[bi]) {
            pruned_leaves.push((*br, leaf));
        }
    }
    let survivors = SurvivorSet {
        rho,
        inv_rho,
        cells: live
            .iter()
            .map(|(bi, c)| (branches[*bi].0, *c))
            .collect(),
        pruned: pruned_leaves,
        total_area,
        budget_exhausted: report.budget_exhausted,
        orientation_preserving_only: budget.orientation_preserving_only,
    };

    if let Some(verify_depth) = budget.candidate_verify_depth {
        for (br, cell) in survivors.cells.iter().take(64) {
            let (ca, cb) = cell.center();
            let mut probes = vec![(ca, cb)];
            probes.extend(cell.corners());
            for (pa, pb) in probes {
                if pa.is_zero() {
                    continue;
                }
                // convert back to original coordinates for the Neg branch
                let candidate = match br {
                    Branch::Pos => AffineMap1D { ratio: pa, translation: pb },
                    Branch::Neg => {
                        AffineMap1D { ratio: -pa.clone(), translation: &pa + &pb }
                    }
                };
                if let Ok(EmbedStatus::VerifiedToDepth(d)) =
                    verify_map(&candidate, x, y, verify_depth)
                {
                    if d >= verify_depth {
                        return Ok((
                            CertifyOutcome::NonemptyCandidate {
                                map: candidate,
                                verified_depth: d,
                                survivors: Box::new(survivors),
                            },
                            report,
                        ));
                    }
                }
            }
        }
    }

    Ok((CertifyOutcome::Unknown(Box::new(survivors)), report))
}
