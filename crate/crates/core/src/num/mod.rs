//! Exact rational and directed-rounding enclosure arithmetic.

pub mod dyadic;
pub mod enclosure;
pub mod rational;
pub mod scalar;

pub use dyadic::{Dyadic, Round};
pub use enclosure::{default_precision, set_default_precision, Enclosure};
pub use rational::Rational;
pub use scalar::Scalar;
