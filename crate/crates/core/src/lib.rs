//! Rigorous computations for affine embeddings of self-similar subsets of
//! the line.
//!
//! The toolkit works with strongly separated self-similar sets
//! `X = ∪ φ_i(X)` and `Y = ∪ ψ_j(Y)` given by contracting affine maps, and
//! provides:
//!
//! * exact rational and directed-rounding enclosure arithmetic ([`num`]);
//! * IFS machinery: word composition, hulls, normalization, separation
//!   certification, cylinder covers and minimal engulfing cylinders
//!   ([`ifs`]);
//! * exact ℚ-linear algebra on logarithms of rational ratios and
//!   brute-force checkers for the quantitative Diophantine lower-bound
//!   conditions ([`arith`]);
//! * multi-rotation orbits, box-dimension estimators and separation probes
//!   ([`orbits`]);
//! * a sound branch-and-bound certifier for emptiness of the set
//!   `ℰ(X,Y) = {f affine : f(X) ⊆ Y}` with replayable certificates
//!   ([`embed`]);
//! * the renormalization operator on parameter cells and its trajectory
//!   diagnostics ([`renorm`]);
//! * dyadic magnification of atomic measures and covering-profile
//!   estimators ([`measures`]).
//!
//! Core types are generic over a [`num::Scalar`]: exact [`Rational`]
//! coefficients when the instance is rational (every rigorous claim is then
//! exact), [`Enclosure`] coefficients otherwise. The concrete aliases below
//! cover the common cases.
//!
//! ```
//! use selfsim::embed::{certify_empty, verify_certificate, CertifyBudget, CertifyOutcome};
//! use selfsim::ifs::IFSystem;
//! use selfsim::Rational;
//!
//! let r = |n, d| Rational::new(n, d);
//! let mut x = IFSystem::<Rational>::from_rational_coeffs(&[
//!     (r(1, 3), r(0, 1)),
//!     (r(1, 3), r(2, 3)),
//! ])?;
//! let mut y = IFSystem::<Rational>::from_rational_coeffs(&[
//!     (r(1, 4), r(0, 1)),
//!     (r(1, 4), r(3, 4)),
//! ])?;
//! x.check_strong_separation(8);
//! y.check_strong_separation(8);
//!
//! let budget = CertifyBudget { max_depth: 30, ..CertifyBudget::default() };
//! let (outcome, _report) = certify_empty(&x, &y, &budget)?;
//! match outcome {
//!     CertifyOutcome::Empty(cert) => verify_certificate(&cert, &x, &y)?,
//!     other => panic!("expected a certificate, got {other:?}"),
//! }
//! # Ok::<(), selfsim::Error>(())
//! ```

pub mod arith;
pub mod embed;
pub mod error;
pub mod ifs;
pub mod measures;
pub mod num;
pub mod orbits;
pub mod renorm;

pub use error::{Error, Result};
pub use num::{Dyadic, Enclosure, Rational, Round, Scalar};

/// Affine map with exact rational coefficients.
pub type RationalMap = ifs::AffineMap1D<Rational>;
/// Affine map with enclosure coefficients.
pub type EncMap = ifs::AffineMap1D<Enclosure>;
/// Iterated function system with exact rational coefficients.
pub type RationalIfs = ifs::IFSystem<Rational>;
/// Iterated function system with enclosure coefficients.
pub type EncIfs = ifs::IFSystem<Enclosure>;
/// Interval with exact rational endpoints.
pub type RationalInterval = ifs::Interval<Rational>;
