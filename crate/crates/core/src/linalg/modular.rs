//! Ranks modulo a prime. Reduction mod p is a ring map on entries whose
//! denominators p does not divide, and it can only lower a rank, so full rank
//! mod p certifies full rank over the field.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::Mat;
use crate::field::Surd;
use crate::{ExScalar, Rational};

/// p ≡ 1 (mod 24), so −1, 2 and 3 are all squares mod p.
const P: u64 = 2_305_843_009_213_693_921;
const SQRT_NEG1: u64 = 583_529_827_753_931_384;
const SQRT2: u64 = 432_741_127_753_990_578;
const SQRT3: u64 = 948_352_790_181_489_368;

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn add(a: u64, b: u64) -> u64 {
    ((a as u128 + b as u128) % P as u128) as u64
}

fn sub(a: u64, b: u64) -> u64 {
    add(a, P - b)
}

fn pow(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    acc
}

fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

fn reduce_rational(r: &Rational) -> Option<u64> {
    let p = BigInt::from(P);
    let n = r.numer().mod_floor(&p).to_u64()?;
    let d = r.denom().mod_floor(&p).to_u64()?;
    (d != 0).then(|| mul(n, inv(d)))
}

/// Image of x under i ↦ SQRT_NEG1, √2 ↦ SQRT2, √3 ↦ SQRT3; `None` when a
/// denominator vanishes mod p.
pub fn reduce(x: &ExScalar) -> Option<u64> {
    let mut acc = 0;
    for surd in Surd::ALL {
        let (re, im) = x.part(surd);
        let gauss = add(reduce_rational(&re)?, mul(reduce_rational(&im)?, SQRT_NEG1));
        let unit = match surd {
            Surd::One => 1,
            Surd::Sqrt2 => SQRT2,
            Surd::Sqrt3 => SQRT3,
            Surd::Sqrt6 => mul(SQRT2, SQRT3),
        };
        acc = add(acc, mul(gauss, unit));
    }
    Some(acc)
}

/// Rank of the reduction mod p, a lower bound for the exact rank.
pub fn modular_rank(m: &Mat<ExScalar>) -> Option<usize> {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<u64>> = (0..rows).map(|i| (0..cols).map(|j| reduce(m.get(i, j))).collect::<Option<_>>()).collect::<Option<_>>()?;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let scale = inv(a[r][c]);
        for i in r + 1..rows {
            let f = mul(a[i][c], scale);
            if f != 0 {
                for j in c..cols {
                    let v = mul(f, a[r][j]);
                    a[i][j] = sub(a[i][j], v);
                }
            }
        }
        r += 1;
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank_nullspace;
    use crate::{Field, Ring};
    use proptest::prelude::*;

    #[test]
    fn constants_are_square_roots() {
        assert_eq!(mul(SQRT_NEG1, SQRT_NEG1), P - 1);
        assert_eq!(mul(SQRT2, SQRT2), 2);
        assert_eq!(mul(SQRT3, SQRT3), 3);
    }

    #[test]
    fn reduction_is_a_ring_map() {
        let xs = [ExScalar::omega(), ExScalar::sqrt2().plus(&ExScalar::from_frac(3, 7)), ExScalar::i().times(&ExScalar::sqrt3())];
        for x in &xs {
            for y in &xs {
                assert_eq!(reduce(&x.times(y)), Some(mul(reduce(x).unwrap(), reduce(y).unwrap())));
                assert_eq!(reduce(&x.plus(y)), Some(add(reduce(x).unwrap(), reduce(y).unwrap())));
            }
            assert_eq!(mul(reduce(x).unwrap(), reduce(&x.inv().unwrap()).unwrap()), 1);
        }
        let bad = ExScalar::from_rational(Rational::new(1.into(), BigInt::from(P)));
        assert_eq!(reduce(&bad), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn never_exceeds_exact_rank(entries in proptest::collection::vec((-3i64..=3, 1i64..4, 0usize..3), 16)) {
            let basis = [ExScalar::one(), ExScalar::sqrt2(), ExScalar::i()];
            let m = Mat::from_fn(4, 4, |i, j| {
                let (n, d, b) = entries[4 * i + j];
                ExScalar::from_frac(n, d).times(&basis[b])
            });
            // Force some dependence half the time.
            let m = if entries[0].0 > 0 { Mat::from_fn(4, 4, |i, j| if i == 3 { m.get(0, j).plus(m.get(1, j)) } else { m.get(i, j).clone() }) } else { m };
            let exact = rank_nullspace(&m).rank;
            prop_assert_eq!(modular_rank(&m), Some(exact));
        }
    }
}
