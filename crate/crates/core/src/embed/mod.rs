//! Branch-and-bound certification of emptiness for the set of affine
//! embeddings `ℰ(X,Y) = {f(x) = ax + b : f(X) ⊆ Y}`.
//!
//! The parameter plane `(a,b)` is reduced to the compact band
//! `1/ρ ≤ |a| ≤ 1`, `b ∈ [0,1]` (see [`initial_region`] for the
//! justification chain), covered by closed dyadic cells, and searched
//! breadth-first: a cell is excluded when some cylinder witness point of `X`
//! provably maps outside a cylinder cover of `Y` for every parameter in the
//! cell. Exclusions are recorded in a replayable [`Certificate`]; an `Empty`
//! outcome is only produced when every leaf of the subdivision tree carries
//! a verified exclusion witness.
//!
//! Orientation-reversing embeddings are searched in a mirrored copy: an
//! `f` with `a < 0` embeds `X` iff `g(x) = -a·x + (a+b)` embeds the
//! reflected system, so the negative band is handled by the positive-band
//! search over `reflect(X)`.

mod cell;
mod certificate;
mod certify;
mod cover;
mod prune;
mod region;
mod search;
mod verify;

pub use cell::ParamCell;
pub use certificate::{BranchCert, Certificate, InstanceHeader, LeafCert, PointSelector};
pub use certificate::Branch;
pub use certify::{certify_empty, CertifyBudget, CertifyOutcome, RunReport, SurvivorSet};
pub use cover::CoverTable;
pub use prune::{prune_cell, PruneOutcome, XWitnessContext};
pub use region::{initial_region, ParamRegion};
pub use search::{search_embeddings, verify_map, EmbedStatus};
pub use verify::{verify_certificate, verify_certificate_at};
