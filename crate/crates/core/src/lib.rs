//! Exact and floating linear algebra for certifying extremality, factorizability
//! and dependence structure of unital quantum channels.
//!
//! Scalars live in the field Q(i, sqrt2, sqrt3) ([`ExScalar`]); polynomials in a
//! channel parameter `t` are [`TPoly`]. Matrices ([`Mat`]) are generic over the
//! [`Ring`] trait so the same constructions run exactly, symbolically in `t`, or
//! in complex doubles.
#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod channels;
pub mod entanglement;
mod error;
pub mod extremality;
pub mod factorization;
pub mod field;
pub mod linalg;
pub mod omega;
mod ring;
pub mod sampling;

pub use error::{Error, Result};
pub use field::{ExScalar, Poly, Rational, TPoly};
pub use linalg::Mat;
pub use num_complex::Complex64 as C64;
pub use ring::{ExactDiv, Field, Ring, Scalar, ToC64, FLOAT_TOL};
