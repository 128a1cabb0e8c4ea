//! Exact arithmetic over rationals and real quadratic surds, and certified
//! numeric enclosures for rendering and for literal parameters.

mod certified;
pub(crate) mod decimal;
mod surd;

pub use certified::CertifiedReal;
pub use decimal::{format_ratio, ln_big, log2_big};
pub use surd::{is_squarefree, surd_arith, surd_eval, surd_sign, ArithOp, QuadSurd};
pub(crate) use surd::surd_sign_i128;

/// Exact rationals (`gcd(num, den) = 1`, `den ≥ 1`).
pub type Rational = num_rational::BigRational;
