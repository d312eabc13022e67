use core::fmt::Debug;

use num_traits::{One, Zero};

use crate::{Error, ExScalar, Rational, Result, TPoly, C64};

/// Commutative ring with an involution, the scalar interface of [`crate::Mat`].
///
/// Method names avoid `add`/`mul` so they never collide with the operator traits
/// that concrete scalars also implement.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_int(n: i64) -> Self;
    fn conj(&self) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// Division that must be exact (Bareiss pivots, deflation).
pub trait ExactDiv: Ring {
    fn exact_div(&self, divisor: &Self) -> Result<Self>;
}

pub trait Field: ExactDiv {
    fn inv(&self) -> Result<Self>;

    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.times(&other.inv()?))
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_int(n: i64) -> Self {
        Rational::from_integer(n.into())
    }
    fn conj(&self) -> Self {
        self.clone()
    }
}

impl ExactDiv for Rational {
    fn exact_div(&self, divisor: &Self) -> Result<Self> {
        self.div(divisor)
    }
}

impl Field for Rational {
    fn inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::DivideByZero)
        } else {
            Ok(self.recip())
        }
    }
}

impl Ring for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_int(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn conj(&self) -> Self {
        C64::new(self.re, -self.im)
    }
}

impl ExactDiv for C64 {
    fn exact_div(&self, divisor: &Self) -> Result<Self> {
        self.div(divisor)
    }
}

impl Field for C64 {
    fn inv(&self) -> Result<Self> {
        if Ring::is_zero(self) {
            Err(Error::DivideByZero)
        } else {
            Ok(C64::new(1.0, 0.0) / self)
        }
    }
}

/// Tolerance used wherever a floating backend stands in for exact equality.
pub const FLOAT_TOL: f64 = 1e-10;

/// A [`Ring`] whose elements have a size, so exact and floating backends can
/// share tolerance-aware checks.
pub trait Scalar: Ring {
    /// Exact backends compare with `==`, floating ones within [`FLOAT_TOL`].
    const EXACT: bool;

    fn magnitude(&self) -> f64;

    fn approx_eq(&self, other: &Self) -> bool {
        if Self::EXACT {
            self == other
        } else {
            self.minus(other).magnitude() <= FLOAT_TOL
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn magnitude(&self) -> f64 {
        crate::field::rational_to_f64(self).abs()
    }
}

impl Scalar for ExScalar {
    const EXACT: bool = true;
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
}

/// Largest coefficient size.
impl Scalar for TPoly {
    const EXACT: bool = true;
    fn magnitude(&self) -> f64 {
        self.coeffs().iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Floating image of a scalar, for spectral checks on exact data.
pub trait ToC64 {
    fn approx_c64(&self) -> C64;
}

impl ToC64 for Rational {
    fn approx_c64(&self) -> C64 {
        C64::new(crate::field::rational_to_f64(self), 0.0)
    }
}

impl ToC64 for ExScalar {
    fn approx_c64(&self) -> C64 {
        self.to_c64()
    }
}

impl ToC64 for C64 {
    fn approx_c64(&self) -> C64 {
        *self
    }
}
