//! Quantitative orbit-equivalence laboratory.
//!
//! Exact and Monte Carlo tools for Følner tilings of amenable groups, the
//! couplings they induce, gradient-transfer inequalities, wreath-product
//! couplings and Rips hyperbolicity audits on finite graphs.

pub mod budget;
pub mod coupling;
pub mod error;
pub mod functional;
pub mod group;
pub mod hyperbolicity;
pub mod odometer;
pub mod rng;
pub mod tiling;
pub mod wreath;

pub use budget::Budget;
pub use coupling::{CouplingPoint, IntegrabilityGauge, MatchedCoupling, Side};
pub use error::{Error, Result};
pub use group::{BsElement, Family, GroupDescriptor, GroupElement, LampElement};
pub use tiling::{DiameterMode, LetterRule, Orientation, TilingSequence};

/// Exact rationals used for Følner constants, tails and profiles.
pub type Rational = num_rational::Ratio<i128>;

/// Serializes a rational as the string `"p/q"` (or `"p"` when integral).
pub(crate) fn rational_string<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(q)
}
