use alloc::vec::Vec;

use super::Mat;
use crate::{Error, ExScalar, ExactDiv, Field, Poly, Result, Ring, TPoly};

/// Largest polynomial determinant attempted explicitly.
pub const MAX_EXPLICIT_DET: usize = 36;

#[derive(Debug, Clone, PartialEq)]
pub struct RankNullspace<T> {
    pub rank: usize,
    /// Pivot column of each nonzero row of the reduced echelon form.
    pub pivots: Vec<usize>,
    /// Basis of {v : M v = 0}, one vector per free column, that column's entry 1.
    pub nullspace: Vec<Vec<T>>,
}

/// Exact reduced row echelon form. Pivots are the first nonzero entry in row
/// order, so the returned basis is deterministic.
pub fn rank_nullspace<T: Field>(m: &Mat<T>) -> RankNullspace<T> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a.get(r, c).inv().expect("pivot is nonzero");
        for j in c..cols {
            let v = a.get(r, j).times(&inv);
            a.set(r, j, v);
        }
        for i in 0..rows {
            let f = a.get(i, c).clone();
            if i == r || f.is_zero() {
                continue;
            }
            for j in c..cols {
                let rj = a.get(r, j);
                if !rj.is_zero() {
                    let v = a.get(i, j).minus(&f.times(rj));
                    a.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut nullspace = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v: Vec<T> = (0..cols).map(|_| T::zero()).collect();
        v[free] = T::one();
        for (k, &pc) in pivots.iter().enumerate() {
            v[pc] = a.get(k, free).negated();
        }
        nullspace.push(v);
    }
    RankNullspace { rank: pivots.len(), pivots, nullspace }
}

/// Fraction-free Bareiss determinant; every intermediate division is exact.
pub fn det_bareiss<T: ExactDiv>(m: &Mat<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::Shape(alloc::format!("determinant of a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n > MAX_EXPLICIT_DET {
        return Err(Error::ExplicitTooLarge(n));
    }
    if n == 0 {
        return Ok(T::one());
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(p) => {
                    a.swap_rows(k, p);
                    negate = !negate;
                }
                None => return Ok(T::zero()),
            }
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            let aik = a.get(i, k).clone();
            for j in k + 1..n {
                let num = a.get(i, j).times(&pivot).minus(&aik.times(a.get(k, j)));
                let v = if prev.is_one() { num } else { num.exact_div(&prev)? };
                a.set(i, j, v);
            }
            a.set(i, k, T::zero());
        }
        prev = pivot;
    }
    let d = a.get(n - 1, n - 1).clone();
    Ok(if negate { d.negated() } else { d })
}

/// Determinant of a matrix of polynomials in `t`, by exact evaluation at
/// integer points and Newton interpolation. The number of points comes from
/// the entry degrees (smaller of the row-maxima and column-maxima sums), so
/// the result is the true determinant, not a degree-capped fit.
pub fn det_poly(m: &Mat<TPoly>) -> Result<TPoly> {
    if !m.is_square() {
        return Err(Error::Shape(alloc::format!("determinant of a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n > MAX_EXPLICIT_DET {
        return Err(Error::ExplicitTooLarge(n));
    }
    let line_max = |it: &mut dyn Iterator<Item = &TPoly>| it.filter_map(Poly::degree).max();
    let mut row_sum = 0;
    let mut col_sum = 0;
    for k in 0..n {
        let (Some(r), Some(c)) = (line_max(&mut m.row(k).iter()), line_max(&mut (0..n).map(|i| m.get(i, k)))) else {
            return Ok(TPoly::zero());
        };
        row_sum += r;
        col_sum += c;
    }
    let bound = row_sum.min(col_sum);
    let xs: Vec<ExScalar> = (0..=bound as i64).map(|k| ExScalar::from_int(k - bound as i64 / 2)).collect();
    let mut coeffs = Vec::with_capacity(xs.len());
    for x in &xs {
        coeffs.push(det_bareiss(&m.map(|p| p.eval(x)))?);
    }
    // Divided differences in place, then Horner in the Newton basis.
    for level in 1..xs.len() {
        for i in (level..xs.len()).rev() {
            let num = coeffs[i].minus(&coeffs[i - 1]);
            coeffs[i] = num.div(&xs[i].minus(&xs[i - level]))?;
        }
    }
    let mut p = TPoly::zero();
    for (c, x) in coeffs.iter().zip(&xs).rev() {
        p = p.times(&Poly::new(alloc::vec![x.negated(), ExScalar::one()])).plus(&TPoly::constant(c.clone()));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::{ExScalar, TPoly};
    use proptest::prelude::*;

    fn ex(n: i64) -> ExScalar {
        ExScalar::from_int(n)
    }

    fn mat(rows: &[&[i64]]) -> Mat<ExScalar> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| ex(x)).collect()).collect()).unwrap()
    }

    /// Cofactor expansion along the first row: the independent oracle.
    fn cofactor(m: &Mat<ExScalar>) -> ExScalar {
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = ExScalar::zero();
        for j in 0..n {
            let minor = Mat::from_fn(n - 1, n - 1, |r, c| m.get(r + 1, if c < j { c } else { c + 1 }).clone());
            let term = m.get(0, j).times(&cofactor(&minor));
            acc = if j % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
        }
        acc
    }

    #[test]
    fn small_determinants() {
        assert_eq!(det_bareiss(&mat(&[&[1, 2], &[3, 4]])).unwrap(), ex(-2));
        let t = TPoly::var();
        let m = Mat::from_rows(alloc::vec![alloc::vec![t.clone(), TPoly::one()], alloc::vec![TPoly::one(), t]]).unwrap();
        assert_eq!(det_bareiss(&m).unwrap(), TPoly::new(alloc::vec![ex(-1), ex(0), ex(1)]));
    }

    #[test]
    fn ranks_and_nullspaces() {
        let ones = mat(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        let r = rank_nullspace(&ones);
        assert_eq!((r.rank, r.nullspace.len()), (1, 2));
        for v in &r.nullspace {
            let col = Mat::from_vec(3, 1, v.clone()).unwrap();
            assert!((&ones * &col).is_zero());
        }
        let id = Mat::<ExScalar>::identity(4);
        let r = rank_nullspace(&id);
        assert_eq!((r.rank, r.nullspace.len()), (4, 0));
    }

    #[test]
    fn too_large_is_rejected() {
        let m = Mat::<TPoly>::identity(MAX_EXPLICIT_DET + 1);
        assert_eq!(det_bareiss(&m), Err(Error::ExplicitTooLarge(MAX_EXPLICIT_DET + 1)));
    }

    #[test]
    fn inverse_round_trip() {
        let m = Mat::from_rows(alloc::vec![
            alloc::vec!["1".parse().unwrap(), "sqrt2".parse().unwrap()],
            alloc::vec!["i".parse().unwrap(), ExScalar::from_rational(rat(1, 3))],
        ])
        .unwrap();
        assert_eq!(&m * &m.inverse().unwrap(), Mat::identity(2));
    }

    fn square(n: usize) -> impl Strategy<Value = Mat<ExScalar>> {
        proptest::collection::vec(-2i64..=2, n * n).prop_map(move |v| Mat::from_vec(n, n, v.into_iter().map(ex).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(m in square(4)) {
            prop_assert_eq!(det_bareiss(&m).unwrap(), cofactor(&m));
        }

        #[test]
        fn nonzero_det_iff_full_rank(m in square(3)) {
            let full = rank_nullspace(&m).rank == 3;
            prop_assert_eq!(!det_bareiss(&m).unwrap().is_zero(), full);
        }

        #[test]
        fn rank_plus_nullity(v in proptest::collection::vec(-1i64..=1, 12)) {
            let m = Mat::from_vec(3, 4, v.into_iter().map(ex).collect()).unwrap();
            let r = rank_nullspace(&m);
            prop_assert_eq!(r.rank + r.nullspace.len(), 4);
            for n in &r.nullspace {
                prop_assert!((&m * &Mat::from_vec(4, 1, n.clone()).unwrap()).is_zero());
            }
        }

        #[test]
        fn interpolated_det_matches_bareiss(v in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 0..4), 16)) {
            let entries: Vec<TPoly> = v.into_iter().map(|c| Poly::new(c.into_iter().map(ex).collect())).collect();
            let m = Mat::from_vec(4, 4, entries).unwrap();
            prop_assert_eq!(det_poly(&m).unwrap(), det_bareiss(&m).unwrap());
        }
    }
}
