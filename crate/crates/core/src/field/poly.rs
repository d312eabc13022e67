use alloc::vec::Vec;
use core::fmt;

use super::ExScalar;
use crate::{Error, ExactDiv, Field, Result, Ring};

/// Univariate polynomial, coefficients lowest degree first with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

/// Polynomial in the channel parameter `t` over the exact field.
pub type TPoly = Poly<ExScalar>;

impl<T: Ring> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Ring::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(alloc::vec![c])
    }

    /// The variable `t`.
    pub fn var() -> Self {
        Self::new(alloc::vec![T::zero(), T::one()])
    }

    pub fn monomial(c: T, k: usize) -> Self {
        let mut v: Vec<T> = (0..k).map(|_| T::zero()).collect();
        v.push(c);
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc.times(x).plus(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.times(&T::from_int(k as i64))).collect())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.times(c)).collect())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| f(&self.coeff(k), &o.coeff(k))).collect())
    }
}

impl<T: Field> Poly<T> {
    /// Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let lead = divisor.leading().ok_or(Error::DivideByZero)?;
        let lead_inv = lead.inv()?;
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot: Vec<T> = (0..rem.len() - dd).map(|_| T::zero()).collect();
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].times(&lead_inv);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].minus(&c.times(dc));
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn monic(&self) -> Result<Self> {
        match self.leading() {
            None => Ok(self.clone()),
            Some(l) => Ok(self.scale(&l.inv()?)),
        }
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl<T: Ring> Ring for Poly<T> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        Self::constant(T::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.plus(b))
    }
    fn minus(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.minus(b))
    }
    fn times(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out: Vec<T> = (0..self.coeffs.len() + other.coeffs.len() - 1).map(|_| T::zero()).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].plus(&a.times(b));
                }
            }
        }
        Self::new(out)
    }
    fn negated(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(Ring::negated).collect() }
    }
    fn from_int(n: i64) -> Self {
        Self::constant(T::from_int(n))
    }
    /// Conjugates coefficients; the variable is real.
    fn conj(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(Ring::conj).collect() }
    }
}

impl<T: Field> ExactDiv for Poly<T> {
    fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible)
        }
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        Ok(())
    }
}

impl<T: Ring> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Poly").field(&self.coeffs).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> TPoly {
        Poly::new(c.iter().map(|&x| ExScalar::from_int(x)).collect())
    }

    #[test]
    fn exact_division() {
        assert_eq!(p(&[-1, 0, 1]).exact_div(&p(&[-1, 1])).unwrap(), p(&[1, 1]));
        assert_eq!(p(&[-1, 0, 1]).exact_div(&p(&[-2, 1])), Err(Error::NotDivisible));
    }

    #[test]
    fn evaluation_and_degree() {
        assert!(p(&[-1, 0, 1]).eval(&ExScalar::one()).is_zero());
        assert_eq!(p(&[1, 1]).times(&p(&[-1, 1])).degree(), Some(2));
        assert_eq!(TPoly::zero().degree(), None);
        assert_eq!(TPoly::zero().coeffs().len(), 0);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let a = p(&[-1, 1]).times(&p(&[2, 1]));
        let b = p(&[-1, 1]).times(&p(&[3, 0, 1]));
        assert_eq!(a.gcd(&b).unwrap(), p(&[-1, 1]));
    }

    fn poly() -> impl Strategy<Value = TPoly> {
        proptest::collection::vec(-5i64..=5, 0..5).prop_map(|c| p(&c))
    }

    proptest! {
        #[test]
        fn eval_is_homomorphism(a in poly(), b in poly(), x in -4i64..=4) {
            let x = ExScalar::from_int(x);
            prop_assert_eq!(a.times(&b).eval(&x), a.eval(&x).times(&b.eval(&x)));
            prop_assert_eq!(a.plus(&b).eval(&x), a.eval(&x).plus(&b.eval(&x)));
        }

        #[test]
        fn division_identity(a in poly(), b in poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert_eq!(q.times(&b).plus(&r), a);
            prop_assert!(r.degree() < b.degree() || r.is_zero());
        }
    }
}
