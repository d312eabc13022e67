//! The scalar field Q(i, sqrt2, sqrt3), polynomials over it, and root finding.

mod parse;
mod poly;
mod roots;
mod scalar;

pub use poly::{Poly, TPoly};
pub use roots::{find_roots, IntervalRoot, NumericRoot, RootReport};
pub(crate) use scalar::rational_to_f64;
pub use scalar::{gaussian_text, parse_rational, ExScalar, Surd};

/// Arbitrary-precision rational; always kept in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
