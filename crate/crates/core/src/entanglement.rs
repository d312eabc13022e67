//! Upper bounds on the entanglement of formation of a channel's Choi state,
//! using the pure-state ensemble given by the vectorized Kraus operators.
//!
//! Entropies are in bits: S(ρ) = −Σ λ log₂ λ.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::channels::{choi_matrix, KrausSet};
use crate::linalg::{hermitian_eig, MatrixRank};
use crate::{Error, Field, Mat, Result, Ring, Scalar, ToC64};

const SUM_TOL: f64 = 1e-12;
const NEG_TOL: f64 = 1e-15;

/// Von Neumann entropy of a probability vector, base 2, with 0·log 0 = 0.
pub fn entropy(spectrum: &[f64]) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(Error::BadDistribution(String::from("empty spectrum")));
    }
    if let Some(x) = spectrum.iter().find(|x| !x.is_finite() || **x < -NEG_TOL) {
        return Err(Error::BadDistribution(format!("entry {x}")));
    }
    let total: f64 = spectrum.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::BadDistribution(format!("sums to {total}")));
    }
    Ok(spectrum.iter().filter(|&&x| x > 0.0).map(|&x| -x * libm::log2(x)).sum::<f64>() + 0.0)
}

/// h(x) = −x log₂ x − (1−x) log₂(1−x).
pub fn binary_entropy(x: f64) -> Result<f64> {
    entropy(&[x, 1.0 - x])
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember<T: Ring> {
    /// ‖A_k‖²/(N·d), exact on exact backends.
    pub weight: T,
    pub weight_f64: f64,
    /// vec(A_k)/‖A_k‖ as a d²-entry row, unnormalized: the norm may leave the field.
    pub state_vector: Mat<T>,
    /// Spectrum of A_kA_k*/‖A_k‖², descending, padded with zeros to length d.
    pub reduced_spectrum: Vec<f64>,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EofBound<T: Ring> {
    pub bound: f64,
    pub ensemble: Vec<EnsembleMember<T>>,
    /// Kraus vectors pairwise orthogonal, so the ensemble is the Choi eigen-decomposition.
    pub orthogonal: bool,
}

/// Principal 2×2 minors summed: the second elementary symmetric function of the spectrum.
fn second_invariant<T: Field>(m: &Mat<T>) -> T {
    let n = m.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            acc = acc.plus(&m.get(i, i).times(m.get(j, j)).minus(&m.get(i, j).times(m.get(j, i))));
        }
    }
    acc
}

fn reduced_spectrum<T: Field + Scalar + ToC64 + MatrixRank>(rho: &Mat<T>) -> Result<Vec<f64>> {
    let d = rho.rows();
    let mut spectrum = match T::matrix_rank(rho) {
        0 => return Err(Error::PreconditionFailed(String::from("zero Kraus operator"))),
        1 => alloc::vec![1.0],
        2 => {
            // λ² − λ + e₂ = 0 with trace one.
            let e2 = second_invariant(rho).approx_c64().re;
            let disc = libm::sqrt((1.0 - 4.0 * e2).max(0.0));
            alloc::vec![(1.0 + disc) / 2.0, (1.0 - disc) / 2.0]
        }
        _ => hermitian_eig(&rho.map(ToC64::approx_c64))?.values.iter().map(|v| v.max(0.0)).collect(),
    };
    spectrum.resize(d, 0.0);
    Ok(spectrum)
}

/// EoF(Choi/d) ≤ Σ_k w_k·S(Tr₂ |a_k⟩⟨a_k|) with |a_k⟩ = vec(A_k)/‖A_k‖.
pub fn eof_upper_bound<T: Field + Scalar + ToC64 + MatrixRank>(k: &KrausSet<T>) -> Result<EofBound<T>> {
    let d = k.d();
    let scale = k.norm_sq().times(&T::from_int(d as i64)).inv()?;
    let mut ensemble = Vec::with_capacity(k.len());
    let mut bound = 0.0;
    for a in k.generators() {
        let norm_sq = a.hs_inner(a)?;
        if norm_sq.is_zero() {
            continue;
        }
        let weight = norm_sq.times(&scale);
        let rho = (a * &a.adjoint()).scale(&norm_sq.inv()?);
        let reduced_spectrum = reduced_spectrum(&rho)?;
        let s = entropy(&reduced_spectrum)?;
        let weight_f64 = weight.approx_c64().re;
        bound += weight_f64 * s;
        ensemble.push(EnsembleMember { weight, weight_f64, state_vector: a.vec_row(), reduced_spectrum, entropy: s });
    }
    let gens = k.generators();
    let orthogonal =
        (0..gens.len()).all(|i| (i + 1..gens.len()).all(|j| gens[i].hs_inner(&gens[j]).is_ok_and(|v| v.approx_eq(&T::zero()))));
    Ok(EofBound { bound, ensemble, orthogonal })
}

/// Eigenvalues of the trace-one Choi state, descending.
pub fn choi_state_spectrum<T: Field + ToC64>(k: &KrausSet<T>) -> Result<Vec<f64>> {
    let c = choi_matrix(k)?.map(ToC64::approx_c64);
    let d = k.d() as f64;
    Ok(hermitian_eig(&c)?.values.iter().map(|v| v / d).collect())
}

/// Closed form of the bound for the 2×2 block family with |α|² = a, |β|² = 1 − a.
pub fn alpha_beta_closed_form(a: f64) -> Result<f64> {
    let b = 1.0 - a;
    Ok((1.0 + a) / 3.0 * binary_entropy(1.0 / (1.0 + a))? + (1.0 + b) / 3.0 * binary_entropy(1.0 / (1.0 + b))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_family, build_family_float, FamilySpec};
    use crate::ExScalar;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExScalar {
        ExScalar::from_frac(n, d)
    }

    #[test]
    fn entropies() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!((binary_entropy(1.0 / 3.0).unwrap() - 0.918296).abs() < 1e-6);
        assert!((entropy(&[1.0 / 3.0; 3]).unwrap() - 1.58496).abs() < 1e-5);
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(entropy(&[1.0, -1e-16]).unwrap(), 0.0);
        assert!(matches!(entropy(&[0.5, 0.6]), Err(Error::BadDistribution(_))));
        assert!(matches!(entropy(&[1.1, -0.1]), Err(Error::BadDistribution(_))));
        assert!(entropy(&[]).is_err());
    }

    /// |α|² = a with α = √a, β = √(1−a) all inside the field.
    fn alpha_beta(a: (i64, i64)) -> FamilySpec {
        let root = |n: i64, d: i64| ExScalar::sqrt_of_rational(&crate::field::rat(n, d)).unwrap();
        FamilySpec::alpha_beta(root(a.0, a.1), root(a.1 - a.0, a.1))
    }

    #[test]
    fn alpha_beta_values() {
        let half = eof_upper_bound(&build_family(&alpha_beta((1, 2))).unwrap()).unwrap();
        assert!((half.bound - 0.918296).abs() < 1e-6);
        let one = eof_upper_bound(&build_family(&FamilySpec::alpha_beta(ExScalar::one(), ExScalar::zero())).unwrap()).unwrap();
        assert!((one.bound - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn alpha_beta_matches_closed_form() {
        for a in [(0, 4), (1, 4), (2, 4), (3, 4), (4, 4)] {
            let b = eof_upper_bound(&build_family(&alpha_beta(a)).unwrap()).unwrap();
            let expected = alpha_beta_closed_form(a.0 as f64 / a.1 as f64).unwrap();
            assert!((b.bound - expected).abs() < 1e-9, "{a:?}: {} vs {expected}", b.bound);
        }
    }

    #[test]
    fn arveson_ohno() {
        let k = build_family(&FamilySpec::arveson_ohno()).unwrap();
        let b = eof_upper_bound(&k).unwrap();
        assert!((b.bound - 0.8637).abs() < 5e-4);
        assert!(b.orthogonal);
        let weights: Vec<ExScalar> = b.ensemble.iter().map(|m| m.weight.clone()).collect();
        assert_eq!(weights, [q(1, 12), q(1, 4), q(5, 12), q(1, 4)]);
        assert_eq!(weights.iter().fold(ExScalar::zero(), |a, w| a.plus(w)), ExScalar::one());
        let spec = choi_state_spectrum(&k).unwrap();
        for (got, want) in spec.iter().zip([5.0 / 12.0, 0.25, 0.25, 1.0 / 12.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(spec[4..].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn extremes() {
        // Unitary conjugation: maximally entangled Choi state.
        let u = KrausSet::new(3, alloc::vec![crate::channels::key_unitary(3)], ExScalar::one()).unwrap();
        let b = eof_upper_bound(&u).unwrap();
        assert!((b.bound - libm::log2(3.0)).abs() < 1e-12);
        // Complete depolarization through matrix units: product Choi state.
        let units = (0..9).map(|m| Mat::unit(3, m / 3, m % 3)).collect();
        let dep = KrausSet::new(3, units, ExScalar::from(3)).unwrap();
        assert_eq!(eof_upper_bound(&dep).unwrap().bound, 0.0);
    }

    #[test]
    fn float_backend_agrees() {
        for spec in [FamilySpec::arveson_ohno(), FamilySpec::key(4, q(1, 2)), alpha_beta((1, 4))] {
            let exact = eof_upper_bound(&build_family(&spec).unwrap()).unwrap();
            let float = eof_upper_bound(&build_family_float(&spec).unwrap()).unwrap();
            assert!((exact.bound - float.bound).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn key_bound_within_range(d in 3usize..6, n in -9i64..10, den in 1i64..10) {
            let k = build_family(&FamilySpec::key(d, q(n, den))).unwrap();
            let b = eof_upper_bound(&k).unwrap();
            prop_assert!(b.bound >= 0.0 && b.bound <= libm::log2(d as f64) + 1e-12);
            let total = b.ensemble.iter().fold(ExScalar::zero(), |a, m| a.plus(&m.weight));
            prop_assert_eq!(total, ExScalar::one());
            for m in &b.ensemble {
                prop_assert!((m.reduced_spectrum.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
