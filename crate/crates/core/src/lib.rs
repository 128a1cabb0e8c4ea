//! Small gaps in the spectrum `{α m² + n² : m, n ≥ 1}` of a rectangular
//! billiard.
//!
//! The crate enumerates the spectrum exactly, builds certified small gaps
//! from rational approximants whose numerator and denominator both have a
//! divisor near their square root, and compares the billiard against
//! Poisson baselines.

pub mod alpha;
pub mod chebyshev;
pub mod construct;
pub mod diophantine;
pub mod error;
pub mod exact;
pub mod spectrum;
pub mod stats;

mod ser;

pub use alpha::{Alpha, Real};
pub use error::{Error, Result};
