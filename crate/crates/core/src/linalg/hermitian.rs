use alloc::vec::Vec;

use super::Mat;
use crate::{Error, Result, Ring, C64};

/// Relative threshold for [`float_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-10;
const OFFDIAG_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct Eigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Column k pairs with `values[k]`.
    pub vectors: Mat<C64>,
}

fn frobenius(m: &Mat<C64>) -> f64 {
    libm::sqrt(m.data().iter().map(|z| z.norm_sqr()).sum::<f64>())
}

fn off_diagonal(m: &Mat<C64>) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m.get(i, j).norm_sqr();
            }
        }
    }
    libm::sqrt(s)
}

/// Cyclic complex Jacobi rotations.
pub fn hermitian_eig(m: &Mat<C64>) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Shape(alloc::format!("eigenproblem of a {}x{} matrix", m.rows(), m.cols())));
    }
    let defect = m.max_defect(&m.adjoint(), |z| z.norm());
    if defect >= HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut q = Mat::<C64>::identity(n);
    let target = OFFDIAG_TOL * frobenius(m);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&a) <= target {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                rotate(&mut a, &mut q, p, r);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).re.total_cmp(&a.get(i, i).re));
    let values = order.iter().map(|&k| a.get(k, k).re).collect();
    let vectors = Mat::from_fn(n, n, |i, j| *q.get(i, order[j]));
    Ok(Eigen { values, vectors })
}

/// Zeroes a_pq with V = [[c, −s], [s·e^{−iφ}, c·e^{−iφ}]] on columns p, q,
/// where a_pq = |a_pq|·e^{iφ}; applies A ← V*AV and Q ← QV.
fn rotate(a: &mut Mat<C64>, q: &mut Mat<C64>, p: usize, r: usize) {
    let apq = *a.get(p, r);
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let conj_phase = phase.conj();
    let theta = 0.5 * libm::atan2(2.0 * mag, a.get(p, p).re - a.get(r, r).re);
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    let n = a.rows();
    let column_update = |m: &mut Mat<C64>| {
        for k in 0..n {
            let (xp, xq) = (*m.get(k, p), *m.get(k, r));
            m.set(k, p, xp * c + xq * conj_phase * s);
            m.set(k, r, -xp * s + xq * conj_phase * c);
        }
    };
    column_update(a);
    column_update(q);
    for k in 0..n {
        let (xp, xq) = (*a.get(p, k), *a.get(r, k));
        a.set(p, k, xp * c + xq * phase * s);
        a.set(r, k, -xp * s + xq * phase * c);
    }
    a.set(p, r, C64::zero());
    a.set(r, p, C64::zero());
    let (dp, dr) = (a.get(p, p).re, a.get(r, r).re);
    a.set(p, p, C64::new(dp, 0.0));
    a.set(r, r, C64::new(dr, 0.0));
}

/// Numerical rank: eigenvalues above `tol_rel`·(largest). Hermitian inputs are
/// diagonalized directly (absolute eigenvalues); others go through M*M.
pub fn float_rank(m: &Mat<C64>, tol_rel: f64) -> usize {
    let hermitian = m.is_square() && m.max_defect(&m.adjoint(), |z| z.norm()) < HERMITIAN_TOL * frobenius(m).max(1.0);
    let values: Vec<f64> = if hermitian {
        hermitian_eig(m).map(|e| e.values.iter().map(|v| v.abs()).collect()).unwrap_or_default()
    } else {
        let g = &m.adjoint() * m;
        hermitian_eig(&g).map(|e| e.values).unwrap_or_default()
    };
    let top = values.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > tol_rel * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real(rows: &[&[f64]]) -> Mat<C64> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect()).unwrap()
    }

    #[test]
    fn diagonal_sorted() {
        let e = hermitian_eig(&real(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]])).unwrap();
        assert_eq!(e.values, alloc::vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn swap_matrix() {
        let e = hermitian_eig(&real(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(matches!(hermitian_eig(&real(&[&[0.0, 1.0], &[0.0, 0.0]])), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn ranks() {
        assert_eq!(float_rank(&Mat::identity(4), DEFAULT_RANK_TOL), 4);
        assert_eq!(float_rank(&Mat::from_fn(4, 4, |_, _| C64::new(1.0, 0.0)), DEFAULT_RANK_TOL), 1);
        let rect = real(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        assert_eq!(float_rank(&rect, DEFAULT_RANK_TOL), 1);
    }

    fn hermitian(n: usize) -> impl Strategy<Value = Mat<C64>> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            let m = Mat::from_vec(n, n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap();
            &m + &m.adjoint()
        })
    }

    proptest! {
        #[test]
        fn trace_and_orthonormality(m in hermitian(5)) {
            let e = hermitian_eig(&m).unwrap();
            let tr: f64 = m.trace().unwrap().re;
            prop_assert!((e.values.iter().sum::<f64>() - tr).abs() < 1e-9);
            let v = &e.vectors;
            let g = &v.adjoint() * v;
            prop_assert!(g.max_defect(&Mat::identity(5), |z| z.norm()) < 1e-9);
            for k in 0..5 {
                let col = Mat::from_fn(5, 1, |i, _| *v.get(i, k));
                let res = &(&m * &col) - &col.scale(&C64::new(e.values[k], 0.0));
                prop_assert!(res.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() < 1e-9);
            }
        }
    }
}
