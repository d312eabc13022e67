use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::Rational;
use crate::{Error, ExactDiv, Field, Result, Ring, C64};

/// The four real basis directions of Q(sqrt2, sqrt3) over Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Surd {
    One,
    Sqrt2,
    Sqrt3,
    Sqrt6,
}

impl Surd {
    pub const ALL: [Surd; 4] = [Surd::One, Surd::Sqrt2, Surd::Sqrt3, Surd::Sqrt6];

    fn bits(self) -> u8 {
        match self {
            Surd::One => 0,
            Surd::Sqrt2 => 2,
            Surd::Sqrt3 => 4,
            Surd::Sqrt6 => 6,
        }
    }

    /// Key used by the JSON object form.
    pub fn key(self) -> &'static str {
        match self {
            Surd::One => "1",
            Surd::Sqrt2 => "sqrt2",
            Surd::Sqrt3 => "sqrt3",
            Surd::Sqrt6 => "sqrt6",
        }
    }

    pub fn from_key(key: &str) -> Option<Surd> {
        Surd::ALL.into_iter().find(|s| s.key() == key)
    }
}

/// Basis index: bit 0 is `i`, bit 1 is `sqrt2`, bit 2 is `sqrt3`.
type Basis = u8;

/// e_a * e_b = factor * e_(a xor b).
fn basis_product(a: Basis, b: Basis) -> (Basis, i64) {
    let common = a & b;
    let mut f = 1;
    if common & 1 != 0 {
        f = -f;
    }
    if common & 2 != 0 {
        f *= 2;
    }
    if common & 4 != 0 {
        f *= 3;
    }
    (a ^ b, f)
}

fn basis_value(b: Basis) -> C64 {
    let mut r = 1.0;
    if b & 2 != 0 {
        r *= core::f64::consts::SQRT_2;
    }
    if b & 4 != 0 {
        r *= libm::sqrt(3.0);
    }
    if b & 1 != 0 {
        C64::new(0.0, r)
    } else {
        C64::new(r, 0.0)
    }
}

const BASIS_NAMES: [&str; 8] = ["", "i", "sqrt2", "i*sqrt2", "sqrt3", "i*sqrt3", "sqrt6", "i*sqrt6"];

/// Exact element of Q(i, sqrt2, sqrt3).
///
/// Stored sparsely as `(basis, coefficient)` pairs sorted by basis with no zero
/// coefficients, so structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExScalar {
    terms: Vec<(Basis, Rational)>,
}

impl ExScalar {
    fn from_coords(coords: [Option<Rational>; 8]) -> Self {
        let terms = coords.into_iter().enumerate().filter_map(|(b, c)| c.filter(|c| !c.is_zero()).map(|c| (b as Basis, c))).collect();
        ExScalar { terms }
    }

    fn single(b: Basis, c: Rational) -> Self {
        if c.is_zero() {
            ExScalar::default()
        } else {
            ExScalar { terms: alloc::vec![(b, c)] }
        }
    }

    fn coord(&self, b: Basis) -> Rational {
        self.terms.iter().find(|(k, _)| *k == b).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::single(0, r)
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(num.into(), den.into()))
    }

    pub fn from_gaussian(re: Rational, im: Rational) -> Self {
        Self::from_parts([(re, im), Default::default(), Default::default(), Default::default()])
    }

    /// Builds `Σ (re + i·im)·surd` from Gaussian coordinates in [`Surd::ALL`] order.
    pub fn from_parts(parts: [(Rational, Rational); 4]) -> Self {
        let mut coords: [Option<Rational>; 8] = Default::default();
        for (s, (re, im)) in Surd::ALL.into_iter().zip(parts) {
            coords[s.bits() as usize] = Some(re);
            coords[(s.bits() | 1) as usize] = Some(im);
        }
        Self::from_coords(coords)
    }

    pub fn i() -> Self {
        Self::single(1, Rational::one())
    }

    pub fn surd(s: Surd) -> Self {
        Self::single(s.bits(), Rational::one())
    }

    pub fn sqrt2() -> Self {
        Self::surd(Surd::Sqrt2)
    }

    pub fn sqrt3() -> Self {
        Self::surd(Surd::Sqrt3)
    }

    /// Primitive cube root of unity (−1 + i·sqrt3)/2.
    pub fn omega() -> Self {
        let half = Rational::new(1.into(), 2.into());
        Self::from_coords([Some(-half.clone()), None, None, None, None, Some(half), None, None])
    }

    /// Gaussian coordinate `(re, im)` along one surd direction.
    pub fn part(&self, s: Surd) -> (Rational, Rational) {
        (self.coord(s.bits()), self.coord(s.bits() | 1))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(b, _)| b & 1 == 0)
    }

    pub fn to_c64(&self) -> C64 {
        self.terms.iter().fold(C64::new(0.0, 0.0), |acc, (b, c)| acc + basis_value(*b) * rational_to_f64(c))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::default();
        }
        ExScalar { terms: self.terms.iter().map(|(b, c)| (*b, c * r)).collect() }
    }

    /// |x|² as a field element (real, nonnegative).
    pub fn abs_sq(&self) -> Self {
        self.times(&self.conj())
    }

    /// Exact square root of a nonnegative rational when it lies in the field.
    pub fn sqrt_of_rational(r: &Rational) -> Option<Self> {
        if r.is_negative() {
            return Self::sqrt_of_rational(&-r).map(|s| s.times(&Self::i()));
        }
        if r.is_zero() {
            return Some(Self::default());
        }
        // sqrt(n/d) = sqrt(n·d)/d; split n·d = s²·k with k squarefree.
        let nd = r.numer() * r.denom();
        let (s, k) = square_split(&nd)?;
        let surd = match k.to_u8()? {
            1 => Surd::One,
            2 => Surd::Sqrt2,
            3 => Surd::Sqrt3,
            6 => Surd::Sqrt6,
            _ => return None,
        };
        Some(Self::single(surd.bits(), Rational::new(s, r.denom().clone())))
    }

    fn mul_ref(&self, o: &Self) -> Self {
        if self.terms.is_empty() || o.terms.is_empty() {
            return Self::default();
        }
        let mut acc: [Option<Rational>; 8] = Default::default();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let (c, f) = basis_product(*a, *b);
                let mut p = x * y;
                if f != 1 {
                    p = p * BigInt::from(f);
                }
                match &mut acc[c as usize] {
                    Some(v) => *v += p,
                    slot => *slot = Some(p),
                }
            }
        }
        Self::from_coords(acc)
    }

    fn add_ref(&self, o: &Self, negate: bool) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let sign = |c: &Rational| if negate { -c } else { c.clone() };
        while i < self.terms.len() || j < o.terms.len() {
            match (self.terms.get(i), o.terms.get(j)) {
                (Some((a, x)), Some((b, y))) if a == b => {
                    let s = if negate { x - y } else { x + y };
                    if !s.is_zero() {
                        terms.push((*a, s));
                    }
                    i += 1;
                    j += 1;
                }
                (Some((a, x)), Some((b, _))) if a < b => {
                    terms.push((*a, x.clone()));
                    i += 1;
                }
                (Some((a, x)), None) => {
                    terms.push((*a, x.clone()));
                    i += 1;
                }
                (_, Some((b, y))) => {
                    terms.push((*b, sign(y)));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        ExScalar { terms }
    }

    /// Multiplicative inverse via the 8×8 rational system x·y = 1.
    pub fn inverse(&self) -> Result<Self> {
        match self.terms.as_slice() {
            [] => Err(Error::DivideByZero),
            [(b, c)] => {
                // e_b·e_b = f, so (c·e_b)^{-1} = e_b/(c·f).
                let (_, f) = basis_product(*b, *b);
                Ok(Self::single(*b, (c * BigInt::from(f)).recip()))
            }
            _ => {
                let mut m: Vec<Vec<Rational>> = (0..8).map(|_| alloc::vec![Rational::zero(); 9]).collect();
                for j in 0..8u8 {
                    let col = self.mul_ref(&Self::single(j, Rational::one()));
                    for (b, c) in col.terms {
                        m[b as usize][j as usize] = c;
                    }
                }
                m[0][8] = Rational::one();
                let y = solve_augmented(m).ok_or(Error::DivideByZero)?;
                let mut coords: [Option<Rational>; 8] = Default::default();
                for (k, v) in y.into_iter().enumerate() {
                    coords[k] = Some(v);
                }
                Ok(Self::from_coords(coords))
            }
        }
    }
}

/// Gauss–Jordan on an n×(n+1) augmented rational system; None when singular.
fn solve_augmented(mut m: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let n = m.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let v = &m[col][c] * &f;
                    m[r][c] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Writes n = s²·k with k squarefree, by trial division. Gives up on large n.
fn square_split(n: &BigInt) -> Option<(BigInt, BigInt)> {
    let mut n = n.to_u64()?;
    let (mut s, mut k) = (1u64, 1u64);
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            k *= p;
        }
        p += 1;
        if p > 1_000_000 {
            return None;
        }
    }
    k *= n;
    Some((s.into(), k.into()))
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Gaussian rational in the text form `a/b`, `c/d i` or `a/b+c/d i`.
pub fn gaussian_text(re: &Rational, im: &Rational) -> String {
    use alloc::format;
    match (re.is_zero(), im.is_zero()) {
        (_, true) => format!("{re}"),
        (true, false) => format!("{im} i"),
        (false, false) if im.is_negative() => format!("{re}-{} i", -im),
        _ => format!("{re}+{im} i"),
    }
}

/// Parses `a`, `a/b` with optional sign and surrounding whitespace.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(alloc::format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if num_traits::Zero::is_zero(&d) {
        return Err(Error::DivideByZero);
    }
    Ok(Rational::new(n, d))
}

impl Ring for ExScalar {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        self.add_ref(other, false)
    }
    fn minus(&self, other: &Self) -> Self {
        self.add_ref(other, true)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul_ref(other)
    }
    fn negated(&self) -> Self {
        ExScalar { terms: self.terms.iter().map(|(b, c)| (*b, -c)).collect() }
    }
    fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }
    fn conj(&self) -> Self {
        ExScalar { terms: self.terms.iter().map(|(b, c)| (*b, if b & 1 != 0 { -c } else { c.clone() })).collect() }
    }
}

impl ExactDiv for ExScalar {
    fn exact_div(&self, divisor: &Self) -> Result<Self> {
        Field::div(self, divisor)
    }
}

impl Field for ExScalar {
    fn inv(&self) -> Result<Self> {
        self.inverse()
    }
}

impl From<Rational> for ExScalar {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for ExScalar {
    fn from(n: i64) -> Self {
        <Self as Ring>::from_int(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&ExScalar> for &ExScalar {
            type Output = ExScalar;
            fn $m(self, o: &ExScalar) -> ExScalar {
                Ring::$f(self, o)
            }
        }
        impl $tr<ExScalar> for ExScalar {
            type Output = ExScalar;
            fn $m(self, o: ExScalar) -> ExScalar {
                Ring::$f(&self, &o)
            }
        }
    };
}
forward_binop!(Add, add, plus);
forward_binop!(Sub, sub, minus);
forward_binop!(Mul, mul, times);

impl Neg for ExScalar {
    type Output = ExScalar;
    fn neg(self) -> ExScalar {
        self.negated()
    }
}

impl Neg for &ExScalar {
    type Output = ExScalar;
    fn neg(self) -> ExScalar {
        self.negated()
    }
}

impl fmt::Display for ExScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (b, c)) in self.terms.iter().enumerate() {
            let name = BASIS_NAMES[*b as usize];
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            match (name.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => f.write_str(name)?,
                (false, false) => write!(f, "{mag}*{name}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn ex(s: &str) -> ExScalar {
        s.parse().unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = ex("1+sqrt2");
        let b = ex("1-sqrt2");
        assert_eq!(a * b, ExScalar::from_int(-1));
    }

    #[test]
    fn gaussian_inverse() {
        assert_eq!(ex("1+i").inverse().unwrap(), ex("1/2 - i/2"));
    }

    #[test]
    fn closure_table() {
        let (s2, s3, s6) = (ExScalar::sqrt2(), ExScalar::sqrt3(), ExScalar::surd(Surd::Sqrt6));
        assert_eq!(&s2 * &s3, s6);
        assert_eq!(&s2 * &s6, ExScalar::from_int(2) * s3.clone());
        assert_eq!(&s3 * &s6, ExScalar::from_int(3) * s2.clone());
        assert_eq!(&s2 * &s2, ExScalar::from_int(2));
        assert_eq!(&s3 * &s3, ExScalar::from_int(3));
        assert_eq!(&s6 * &s6, ExScalar::from_int(6));
    }

    #[test]
    fn divide_by_zero() {
        assert_eq!(ExScalar::zero().inverse(), Err(Error::DivideByZero));
    }

    #[test]
    fn omega_is_cube_root() {
        let w = ExScalar::omega();
        assert_eq!(w.times(&w).times(&w), ExScalar::one());
        assert_eq!(w.plus(&w.times(&w)).plus(&ExScalar::one()), ExScalar::zero());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(ExScalar::sqrt_of_rational(&rat(1, 2)).unwrap(), ex("sqrt2/2"));
        assert_eq!(ExScalar::sqrt_of_rational(&rat(2, 3)).unwrap(), ex("sqrt6/3"));
        assert_eq!(ExScalar::sqrt_of_rational(&rat(9, 4)).unwrap(), ex("3/2"));
        assert!(ExScalar::sqrt_of_rational(&rat(4, 5)).is_none());
        let r = ExScalar::sqrt_of_rational(&rat(3, 4)).unwrap();
        assert_eq!(r.times(&r), ExScalar::from_frac(3, 4));
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "-3/7", "i", "1/2 - 3*i*sqrt6", "sqrt2 + 5/3*i*sqrt3"] {
            let x = ex(s);
            assert_eq!(ex(&x.to_string()), x);
        }
    }

    #[test]
    fn gaussian_text_forms() {
        assert_eq!(gaussian_text(&rat(1, 2), &rat(0, 1)), "1/2");
        assert_eq!(gaussian_text(&rat(1, 2), &rat(-3, 4)), "1/2-3/4 i");
        assert_eq!(gaussian_text(&rat(0, 1), &rat(3, 5)), "3/5 i");
        assert_eq!(ex("1/2-3/4 i"), ExScalar::from_gaussian(rat(1, 2), rat(-3, 4)));
    }

    #[test]
    fn float_value() {
        let x = ex("1 + i*sqrt6");
        let z = x.to_c64();
        assert!((z.re - 1.0).abs() < 1e-15 && (z.im - 6f64.sqrt()).abs() < 1e-12);
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=5).prop_map(|(n, d)| rat(n, d))
    }

    fn scalar() -> impl Strategy<Value = ExScalar> {
        proptest::collection::vec(small_rat(), 8).prop_map(|c| {
            let mut coords: [Option<Rational>; 8] = Default::default();
            for (k, v) in c.into_iter().enumerate() {
                coords[k] = Some(v);
            }
            ExScalar::from_coords(coords)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
            prop_assert_eq!((&a * &b) * c.clone(), &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a * &b).conj(), a.conj() * b.conj());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inverse().unwrap(), ExScalar::one());
            }
        }
    }
}
