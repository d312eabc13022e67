//! Roots of polynomials in `t`: exact rational roots with multiplicities, the
//! rest approximated by Aberth–Ehrlich iteration.

use alloc::vec::Vec;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::scalar::rational_to_f64;
use super::{ExScalar, Poly, Rational, TPoly};
use crate::{ExactDiv, Ring, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct NumericRoot {
    pub value: C64,
    /// |p(r)| divided by Σ|c_k||r|^k.
    pub residual: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IntervalRoot {
    Exact(Rational, usize),
    Numeric(f64, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    pub polynomial: TPoly,
    pub degree_bound: Option<usize>,
    pub interval: (Rational, Rational),
    /// The polynomial vanishes identically (every `t` is a root).
    pub identically_zero: bool,
    /// Coefficients were rational, so the exact phase ran.
    pub certified: bool,
    pub exact_roots: Vec<(Rational, usize)>,
    pub numeric_roots: Vec<NumericRoot>,
    /// Cofactor left after dividing out every exact root.
    pub remaining: TPoly,
    pub roots_in_interval: Vec<IntervalRoot>,
}

/// Imaginary parts below this (relative) count as real for interval membership.
const REAL_TOL: f64 = 1e-7;

impl RootReport {
    pub fn degree(&self) -> Option<usize> {
        self.polynomial.degree()
    }

    pub fn within_degree_bound(&self) -> bool {
        match (self.degree_bound, self.polynomial.degree()) {
            (Some(b), Some(d)) => d <= b,
            _ => true,
        }
    }

    pub fn has_exact_root(&self, r: &Rational) -> bool {
        self.exact_roots.iter().any(|(x, _)| x == r)
    }

    pub fn exact_root_set(&self) -> Vec<Rational> {
        self.exact_roots.iter().map(|(r, _)| r.clone()).collect()
    }

    /// Distinct numeric roots (complex), multiplicity ignored.
    fn numeric_set(&self) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        for r in &self.numeric_roots {
            if !out.iter().any(|z| (z - r.value).norm() < 1e-6 * (1.0 + z.norm())) {
                out.push(r.value);
            }
        }
        out
    }

    /// Same roots ignoring multiplicity: exact sets equal, numeric sets match within 1e−6.
    pub fn same_root_set(&self, other: &RootReport) -> bool {
        if self.identically_zero || other.identically_zero {
            return self.identically_zero == other.identically_zero;
        }
        let (mut a, mut b) = (self.exact_root_set(), other.exact_root_set());
        a.sort();
        b.sort();
        if a != b {
            return false;
        }
        let (na, nb) = (self.numeric_set(), other.numeric_set());
        let close = |z: &C64, set: &[C64]| set.iter().any(|w| (z - w).norm() < 1e-6 * (1.0 + z.norm()));
        na.len() == nb.len() && na.iter().all(|z| close(z, &nb))
    }

    /// Exact interval roots, in increasing order.
    pub fn exact_in_interval(&self) -> Vec<Rational> {
        self.roots_in_interval
            .iter()
            .filter_map(|r| match r {
                IntervalRoot::Exact(x, _) => Some(x.clone()),
                IntervalRoot::Numeric(..) => None,
            })
            .collect()
    }
}

pub fn find_roots(p: &TPoly, interval: (Rational, Rational)) -> RootReport {
    let mut report = RootReport {
        polynomial: p.clone(),
        degree_bound: None,
        interval,
        identically_zero: p.is_zero(),
        certified: true,
        exact_roots: Vec::new(),
        numeric_roots: Vec::new(),
        remaining: p.clone(),
        roots_in_interval: Vec::new(),
    };
    if p.is_zero() {
        return report;
    }
    let rational: Option<Vec<Rational>> = p.coeffs().iter().map(ExScalar::as_rational).collect();
    match rational {
        Some(c) => exact_phase(&mut report, Poly::new(c)),
        None => {
            report.certified = false;
            let coeffs: Vec<C64> = p.coeffs().iter().map(ExScalar::to_c64).collect();
            report.numeric_roots = numeric_roots(&coeffs, 1);
        }
    }
    report.exact_roots.sort_by(|a, b| a.0.cmp(&b.0));
    let (lo, hi) = &report.interval;
    let (flo, fhi) = (rational_to_f64(lo), rational_to_f64(hi));
    let mut inside: Vec<IntervalRoot> =
        report.exact_roots.iter().filter(|(r, _)| lo < r && r < hi).map(|(r, m)| IntervalRoot::Exact(r.clone(), *m)).collect();
    for r in &report.numeric_roots {
        let z = r.value;
        if z.im.abs() <= REAL_TOL * z.re.abs().max(1.0) && flo < z.re && z.re < fhi {
            inside.push(IntervalRoot::Numeric(z.re, r.multiplicity));
        }
    }
    report.roots_in_interval = inside;
    report
}

fn exact_phase(report: &mut RootReport, p: Poly<Rational>) {
    // Candidates come from the squarefree parts, multiplicities from deflating p itself.
    let parts = squarefree_parts(&p);
    let mut remaining = p.clone();
    let mut numeric = Vec::new();
    for (f, mult) in parts {
        let mut f = primitive_integer(&f);
        for r in rational_roots_of_squarefree(&f) {
            let lin = Poly::new(alloc::vec![-r.clone(), Rational::from_integer(BigInt::one())]);
            let mut m = 0;
            while let Ok(q) = remaining.exact_div(&lin) {
                remaining = q;
                m += 1;
            }
            debug_assert_eq!(m, mult);
            report.exact_roots.push((r.clone(), m));
            let num = alloc::vec![-r.numer().clone(), r.denom().clone()];
            f = int_exact_div(&f, &num).expect("verified root divides its squarefree factor");
        }
        if f.len() > 1 {
            let c: Vec<C64> = scaled_f64(&f);
            numeric.extend(numeric_roots(&c, mult));
        }
    }
    let pf: Vec<C64> = p.coeffs().iter().map(|c| C64::new(rational_to_f64(c), 0.0)).collect();
    for r in &mut numeric {
        r.residual = relative_residual(&pf, r.value);
    }
    report.numeric_roots = numeric;
    report.remaining = remaining.map(|c| ExScalar::from_rational(c.clone()));
}

/// Yun's algorithm: returns (f_i, i) with p = c·Π f_i^i, each f_i squarefree and monic.
fn squarefree_parts(p: &Poly<Rational>) -> Vec<(Poly<Rational>, usize)> {
    let mut out = Vec::new();
    let dp = p.derivative();
    let c = p.gcd(&dp).expect("nonzero");
    let mut w = p.exact_div(&c).expect("gcd divides");
    let mut y = dp.exact_div(&c).expect("gcd divides");
    let mut z = y.minus(&w.derivative());
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let g = w.gcd(&z).expect("nonzero");
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), i));
        }
        w = w.exact_div(&g).expect("gcd divides");
        y = z.exact_div(&g).expect("gcd divides");
        z = y.minus(&w.derivative());
        i += 1;
    }
    out
}

/// Clears denominators and content; lowest degree first.
fn primitive_integer(p: &Poly<Rational>) -> Vec<BigInt> {
    let l = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.last().is_some_and(|c| c.is_negative()) { -1 } else { 1 };
    ints.into_iter().map(|c| c / &g * sign).collect()
}

/// Exact quotient of integer polynomials, or None when the division is not exact.
fn int_exact_div(p: &[BigInt], d: &[BigInt]) -> Option<Vec<BigInt>> {
    let dd = d.len() - 1;
    if p.len() <= dd {
        return None;
    }
    let mut rem = p.to_vec();
    let mut q = alloc::vec![BigInt::zero(); p.len() - dd];
    let lead = &d[dd];
    for k in (0..q.len()).rev() {
        let (c, r) = rem[k + dd].div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        for (j, dc) in d.iter().enumerate() {
            rem[k + j] -= &c * dc;
        }
        q[k] = c;
    }
    rem.iter().all(Zero::is_zero).then_some(q)
}

/// Whether p(a/b) = 0, via Σ c_k a^k b^(n−k) = 0.
fn is_root(p: &[BigInt], r: &Rational) -> bool {
    let (a, b) = (r.numer(), r.denom());
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    for c in p.iter().rev() {
        acc = acc * a + c * &bpow;
        bpow *= b;
    }
    acc.is_zero()
}

fn rational_roots_of_squarefree(f: &[BigInt]) -> Vec<Rational> {
    let mut roots: Vec<Rational> = Vec::new();
    let n = f.len() - 1;
    if n == 0 {
        return roots;
    }
    let lc = &f[n];
    let c0 = &f[0];
    let consider = |r: Rational, roots: &mut Vec<Rational>| {
        if !roots.contains(&r) && is_root(f, &r) {
            roots.push(r);
        }
    };
    if c0.is_zero() {
        consider(Rational::from_integer(BigInt::zero()), &mut roots);
    }
    if n == 1 {
        consider(Rational::new(-c0.clone(), lc.clone()), &mut roots);
        return roots;
    }
    if let Some(cands) = divisor_candidates(lc, c0) {
        for r in cands {
            consider(r, &mut roots);
        }
        return roots;
    }
    for z in numeric_roots(&scaled_f64(f), 1) {
        if z.value.im.abs() > 1e-6 * z.value.re.abs().max(1.0) {
            continue;
        }
        for r in convergents(z.value.re) {
            if r.numer().is_zero() {
                continue;
            }
            if (lc % r.denom()).is_zero() && (c0.is_zero() || (c0 % r.numer()).is_zero()) {
                consider(r, &mut roots);
            }
        }
    }
    roots
}

/// All ±p/q with p | c0 and q | lc when both are small enough to enumerate.
fn divisor_candidates(lc: &BigInt, c0: &BigInt) -> Option<Vec<Rational>> {
    const LIMIT: u64 = 1_000_000_000_000;
    let a = c0.abs().to_u64().filter(|&x| x > 0 && x <= LIMIT)?;
    let b = lc.abs().to_u64().filter(|&x| x > 0 && x <= LIMIT)?;
    let (da, db) = (divisors(a)?, divisors(b)?);
    if da.len() * db.len() > 20_000 {
        return None;
    }
    let mut out = Vec::new();
    for p in &da {
        for q in &db {
            let r = Rational::new(BigInt::from(*p), BigInt::from(*q));
            out.push(-r.clone());
            out.push(r);
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}

fn divisors(n: u64) -> Option<Vec<u64>> {
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if p > 1_000_000 {
            return None;
        }
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            primes.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        primes.push((m, 1));
    }
    let mut divs = alloc::vec![1u64];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = 1;
            for _ in 0..=e {
                next.push(d * pk);
                pk *= p;
            }
        }
        divs = next;
    }
    Some(divs)
}

/// Continued-fraction convergents of x with denominators below 2^53.
fn convergents(x: f64) -> Vec<Rational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut v = x;
    for _ in 0..40 {
        let a = libm::floor(v);
        let ab = BigInt::from(a as i64);
        let h2 = &ab * &h1 + &h0;
        let k2 = &ab * &k1 + &k0;
        if k2.bits() > 53 {
            break;
        }
        out.push(Rational::new(h2.clone(), k2.clone()));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
        if !v.is_finite() || v.abs() > 1e15 {
            break;
        }
    }
    out
}

/// Integer coefficients as f64, shifted so the largest fits comfortably.
fn scaled_f64(f: &[BigInt]) -> Vec<C64> {
    let maxbits = f.iter().map(|c| c.bits()).max().unwrap_or(0);
    let shift = maxbits.saturating_sub(900) as usize;
    f.iter()
        .map(|c| {
            let v = if shift > 0 {
                let s = c.sign();
                let m = c.magnitude() >> shift;
                let v = m.to_f64().unwrap_or(0.0);
                if s == Sign::Minus {
                    -v
                } else {
                    v
                }
            } else {
                c.to_f64().unwrap_or(0.0)
            };
            C64::new(v, 0.0)
        })
        .collect()
}

fn horner(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn relative_residual(c: &[C64], z: C64) -> f64 {
    let (p, _) = horner(c, z);
    let r = z.norm();
    let scale = c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm());
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// Aberth–Ehrlich on a polynomial with complex coefficients (lowest degree first).
/// Leading zeros are ignored; roots at zero are returned explicitly.
fn numeric_roots(coeffs: &[C64], multiplicity: usize) -> Vec<NumericRoot> {
    let mut c: Vec<C64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let mut out = Vec::new();
    let zeros = c.iter().take_while(|x| x.norm() == 0.0).count();
    for _ in 0..zeros {
        out.push(NumericRoot { value: C64::new(0.0, 0.0), residual: 0.0, multiplicity });
    }
    let c: Vec<C64> = c[zeros..].to_vec();
    if c.len() < 2 {
        return out;
    }
    for z in aberth(&c) {
        out.push(NumericRoot { value: z, residual: relative_residual(&c, z), multiplicity });
    }
    out
}

const ABERTH_TOL: f64 = 1e-12;

fn aberth(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<C64> = c.iter().map(|a| a / lead).collect();
    // Rescale t = s·u with s a power of two near the geometric mean root size.
    let g = libm::log(monic[0].norm().max(f64::MIN_POSITIVE)) / n as f64;
    let s = libm::exp2(libm::round(g / core::f64::consts::LN_2));
    let mut sp = 1.0;
    let scaled: Vec<C64> = monic
        .iter()
        .map(|a| {
            let v = a * sp;
            sp *= s;
            v
        })
        .collect();
    let lead = scaled[n];
    let q: Vec<C64> = scaled.iter().map(|a| a / lead).collect();
    let radius = (0..n).map(|k| libm::pow(q[k].norm(), 1.0 / (n - k) as f64)).fold(0.0, f64::max).max(1e-3);

    let mut seed = 0x9e37_79b9_7f4a_7c15u64;
    let mut jitter = || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut best: Option<(f64, Vec<C64>)> = None;
    for attempt in 0..8 {
        let offset = 0.4 + attempt as f64 * jitter();
        let mut z: Vec<C64> = (0..n)
            .map(|k| {
                let th = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + offset;
                C64::from_polar(radius * (1.0 + 0.1 * jitter()), th)
            })
            .collect();
        let mut done = alloc::vec![false; n];
        for _ in 0..4000 {
            let mut all = true;
            for k in 0..n {
                if done[k] {
                    continue;
                }
                let (p, dp) = horner(&q, z[k]);
                if relative_residual(&q, z[k]) <= ABERTH_TOL * 1e-2 || p.norm() == 0.0 {
                    done[k] = true;
                    continue;
                }
                all = false;
                let ratio = p / dp;
                let mut sum = C64::new(0.0, 0.0);
                for j in 0..n {
                    if j != k {
                        let diff = z[k] - z[j];
                        if diff.norm() > 0.0 {
                            sum += C64::new(1.0, 0.0) / diff;
                        }
                    }
                }
                let w = ratio / (C64::new(1.0, 0.0) - ratio * sum);
                if w.re.is_finite() && w.im.is_finite() {
                    z[k] -= w;
                }
            }
            if all {
                break;
            }
        }
        let worst = z.iter().map(|&x| relative_residual(&q, x)).fold(0.0, f64::max);
        let unscaled: Vec<C64> = z.iter().map(|x| x * s).collect();
        if worst <= ABERTH_TOL {
            return unscaled;
        }
        if best.as_ref().is_none_or(|(w, _)| worst < *w) {
            best = Some((worst, unscaled));
        }
    }
    best.map(|(_, z)| z).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> TPoly {
        Poly::new(c.iter().map(|&x| ExScalar::from_int(x)).collect())
    }

    fn range(lo: i64, hi: i64) -> (Rational, Rational) {
        (rat(lo, 1), rat(hi, 1))
    }

    #[test]
    fn cubic_with_double_root() {
        let r = find_roots(&poly(&[2, -3, 0, 1]), range(-3, 3));
        assert_eq!(r.exact_roots, alloc::vec![(rat(-2, 1), 1), (rat(1, 1), 2)]);
        assert!(r.numeric_roots.is_empty());
        let r = find_roots(&poly(&[-2, -3, 0, 1]), range(-3, 3));
        assert_eq!(r.exact_roots, alloc::vec![(rat(-1, 1), 2), (rat(2, 1), 1)]);
    }

    #[test]
    fn zero_polynomial() {
        let r = find_roots(&TPoly::zero(), range(-1, 1));
        assert!(r.identically_zero);
    }

    #[test]
    fn irrational_roots_numeric() {
        // (t² − 2)(3t − 1)
        let r = find_roots(&poly(&[2, -6, -1, 3]), range(-1, 1));
        assert_eq!(r.exact_roots, alloc::vec![(rat(1, 3), 1)]);
        assert_eq!(r.numeric_roots.len(), 2);
        for z in &r.numeric_roots {
            assert!((z.value.re.abs() - 2f64.sqrt()).abs() < 1e-10);
            assert!(z.residual < 1e-12);
        }
        assert_eq!(r.roots_in_interval, alloc::vec![IntervalRoot::Exact(rat(1, 3), 1)]);
    }

    #[test]
    fn large_coefficient_roots_via_convergents() {
        // (84t + 59)(21t − 107)(3t + 13)(t² + 1)·(large prime constant factor)
        let mut p = poly(&[59, 84]).times(&poly(&[-107, 21])).times(&poly(&[13, 3])).times(&poly(&[1, 0, 1]));
        p = p.times(&poly(&[-1, 0, 0, 0, 0, 0, 0, 1_000_003]));
        p = p.scale(&"1234567890123456789".parse::<ExScalar>().unwrap());
        let r = find_roots(&p, range(-1, 1));
        let set = r.exact_root_set();
        for want in [rat(-59, 84), rat(107, 21), rat(-13, 3)] {
            assert!(set.contains(&want), "{want} missing from {set:?}");
        }
    }

    #[test]
    fn non_rational_is_uncertified() {
        let p = TPoly::new(alloc::vec![ExScalar::from_int(-2), ExScalar::zero(), ExScalar::one()])
            .times(&TPoly::new(alloc::vec![ExScalar::sqrt2().negated(), ExScalar::one()]));
        let r = find_roots(&p, range(-2, 2));
        assert!(!r.certified);
        assert_eq!(r.numeric_roots.len(), 3);
    }

    proptest! {
        #[test]
        fn exact_roots_vanish_and_degrees_add_up(
            roots in proptest::collection::vec((-9i64..=9, 1i64..=6), 1..6),
            extra in proptest::collection::vec(-5i64..=5, 0..4),
        ) {
            let mut p = poly(&[1]);
            for (a, b) in &roots {
                p = p.times(&poly(&[-a, *b]));
            }
            let q = poly(&extra);
            if !q.is_zero() {
                p = p.times(&q);
            }
            let r = find_roots(&p, range(-1, 1));
            for (x, _) in &r.exact_roots {
                prop_assert!(p.eval(&ExScalar::from_rational(x.clone())).is_zero());
            }
            let sum: usize = r.exact_roots.iter().map(|(_, m)| m).sum();
            prop_assert_eq!(p.degree().unwrap(), sum + r.remaining.degree().unwrap());
            for (a, b) in &roots {
                prop_assert!(r.has_exact_root(&rat(*a, *b)));
            }
        }
    }
}
