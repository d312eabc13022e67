//! The channel families, channel application, Choi matrices and UCPT checks.
//!
//! A channel is stored as generators `A_k` and a constant `N` with
//! Φ(ρ) = (1/N)·Σ A_k* ρ A_k. Choi matrices use Σ_ij E_ij ⊗ Φ(E_ij), so their
//! trace is `d`; divide by `d` for the density-matrix convention.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::linalg::MatrixRank;
use crate::{Error, ExScalar, Field, Mat, Result, Ring, Scalar, TPoly, C64};

/// A channel Φ(ρ) = (1/N)·Σ A_k* ρ A_k on d×d matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet<T: Ring> {
    d: usize,
    generators: Vec<Mat<T>>,
    norm_sq: T,
    norm_inferred: bool,
}

impl<T: Ring> KrausSet<T> {
    pub fn new(d: usize, generators: Vec<Mat<T>>, norm_sq: T) -> Result<Self> {
        if let Some(bad) = generators.iter().find(|a| a.shape() != (d, d)) {
            return Err(Error::Shape(format!("generator is {}x{}, expected {d}x{d}", bad.rows(), bad.cols())));
        }
        if norm_sq.is_zero() {
            return Err(Error::BadParameters(String::from("normalization constant is zero")));
        }
        Ok(KrausSet { d, generators, norm_sq, norm_inferred: false })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[Mat<T>] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn norm_sq(&self) -> &T {
        &self.norm_sq
    }

    /// True when `N` was fixed by requiring unitality rather than given with the generators.
    pub fn norm_inferred(&self) -> bool {
        self.norm_inferred
    }

    fn inferred(mut self) -> Self {
        self.norm_inferred = true;
        self
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> KrausSet<U> {
        KrausSet {
            d: self.d,
            generators: self.generators.iter().map(|a| a.map(&f)).collect(),
            norm_sq: f(&self.norm_sq),
            norm_inferred: self.norm_inferred,
        }
    }

    /// Σ A_k*A_k and Σ A_kA_k*.
    pub fn gram_sums(&self) -> (Mat<T>, Mat<T>) {
        let zero = Mat::zeros(self.d, self.d);
        self.generators.iter().fold((zero.clone(), zero), |(l, r), a| {
            let ad = a.adjoint();
            (&l + &(&ad * a), &r + &(a * &ad))
        })
    }
}

impl KrausSet<ExScalar> {
    pub fn to_float(&self) -> KrausSet<C64> {
        self.map(ExScalar::to_c64)
    }
}

impl KrausSet<TPoly> {
    /// Specializes the parameter `t`.
    pub fn eval(&self, t: &ExScalar) -> KrausSet<ExScalar> {
        self.map(|p| p.eval(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyName {
    Key,
    OddSwap,
    EvenSkew,
    UcptAlphaBeta,
    ArvesonOhno,
    OhnoLowrank,
    D6Xy,
    GeneralPartialIsometry,
}

impl FamilyName {
    pub const ALL: [FamilyName; 8] = [
        FamilyName::Key,
        FamilyName::OddSwap,
        FamilyName::EvenSkew,
        FamilyName::UcptAlphaBeta,
        FamilyName::ArvesonOhno,
        FamilyName::OhnoLowrank,
        FamilyName::D6Xy,
        FamilyName::GeneralPartialIsometry,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyName::Key => "key",
            FamilyName::OddSwap => "odd_swap",
            FamilyName::EvenSkew => "even_skew",
            FamilyName::UcptAlphaBeta => "ucpt_alpha_beta",
            FamilyName::ArvesonOhno => "arveson_ohno",
            FamilyName::OhnoLowrank => "ohno_lowrank",
            FamilyName::D6Xy => "d6_xy",
            FamilyName::GeneralPartialIsometry => "general_partial_isometry",
        }
    }

    /// Families of the form S^{−(m−1)}·(t ⊕ V_m)·S^{m−1}.
    pub fn is_partial_isometry(self) -> bool {
        matches!(self, FamilyName::Key | FamilyName::OddSwap | FamilyName::EvenSkew | FamilyName::GeneralPartialIsometry)
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyName::ALL.into_iter().find(|f| f.as_str() == s).ok_or_else(|| Error::BadParameters(format!("unknown family {s:?}")))
    }
}

/// Everything needed to build one member of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: FamilyName,
    pub d: usize,
    /// Corner entry of the partial-isometry families; unused by the others.
    pub t: Option<ExScalar>,
    pub alpha: Option<ExScalar>,
    pub beta: Option<ExScalar>,
    /// One (d−1)×(d−1) unitary per generator, for the general family.
    pub v_list: Option<Vec<Mat<ExScalar>>>,
}

impl FamilySpec {
    fn bare(family: FamilyName, d: usize) -> Self {
        FamilySpec { family, d, t: None, alpha: None, beta: None, v_list: None }
    }

    pub fn key(d: usize, t: ExScalar) -> Self {
        FamilySpec { t: Some(t), ..Self::bare(FamilyName::Key, d) }
    }

    pub fn odd_swap(d: usize, t: ExScalar) -> Self {
        FamilySpec { t: Some(t), ..Self::bare(FamilyName::OddSwap, d) }
    }

    pub fn even_skew(d: usize, t: ExScalar) -> Self {
        FamilySpec { t: Some(t), ..Self::bare(FamilyName::EvenSkew, d) }
    }

    pub fn general(t: ExScalar, v_list: Vec<Mat<ExScalar>>) -> Self {
        FamilySpec { t: Some(t), v_list: Some(v_list.clone()), ..Self::bare(FamilyName::GeneralPartialIsometry, v_list.len()) }
    }

    pub fn alpha_beta(alpha: ExScalar, beta: ExScalar) -> Self {
        FamilySpec { alpha: Some(alpha), beta: Some(beta), ..Self::bare(FamilyName::UcptAlphaBeta, 3) }
    }

    pub fn arveson_ohno() -> Self {
        Self::bare(FamilyName::ArvesonOhno, 3)
    }

    pub fn ohno_lowrank(d: usize) -> Self {
        Self::bare(FamilyName::OhnoLowrank, d)
    }

    pub fn d6_xy() -> Self {
        Self::bare(FamilyName::D6Xy, 6)
    }

    /// The (d−1)×(d−1) unitaries V_m, for partial-isometry families.
    pub fn unitaries(&self) -> Result<Vec<Mat<ExScalar>>> {
        let n = self.d.checked_sub(1).filter(|&n| n >= 1).ok_or(Error::BadDimension(self.d))?;
        match self.family {
            FamilyName::Key => Ok(alloc::vec![key_unitary(n); self.d]),
            FamilyName::OddSwap if self.d % 2 == 1 && self.d >= 3 => Ok(alloc::vec![antidiagonal(n); self.d]),
            FamilyName::EvenSkew if self.d % 2 == 0 => Ok(alloc::vec![antidiagonal(n); self.d]),
            FamilyName::OddSwap | FamilyName::EvenSkew => Err(Error::BadDimension(self.d)),
            FamilyName::GeneralPartialIsometry => {
                let vs = self.v_list.clone().ok_or_else(|| Error::BadParameters(String::from("general family needs V_list")))?;
                if vs.len() != self.d {
                    return Err(Error::BadParameters(format!("{} unitaries given for d = {}", vs.len(), self.d)));
                }
                Ok(vs)
            }
            other => Err(Error::BadParameters(format!("{other} is not a partial-isometry family"))),
        }
    }

    fn expect_d(&self, d: usize) -> Result<()> {
        if self.d == d {
            Ok(())
        } else {
            Err(Error::BadDimension(self.d))
        }
    }
}

/// The cyclic shift S = Σ_k |e_k⟩⟨e_{k+1}| (indices mod d).
pub fn shift<T: Ring>(d: usize) -> Result<Mat<T>> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    Ok(Mat::from_fn(d, d, |i, j| if j == (i + 1) % d { T::one() } else { T::zero() }))
}

/// (2/n)·J − I, the reflection through the uniform vector.
pub fn key_unitary(n: usize) -> Mat<ExScalar> {
    let off = ExScalar::from_frac(2, n as i64);
    let diag = off.minus(&ExScalar::one());
    Mat::from_fn(n, n, |i, j| if i == j { diag.clone() } else { off.clone() })
}

/// Ones on the skew diagonal.
pub fn antidiagonal<T: Ring>(n: usize) -> Mat<T> {
    Mat::from_fn(n, n, |i, j| if i + j + 1 == n { T::one() } else { T::zero() })
}

/// S^{−a}·M·S^{a}, i.e. every index moved forward by `a` mod d.
pub fn conjugate_by_shift<T: Ring>(m: &Mat<T>, a: usize) -> Mat<T> {
    let d = m.rows();
    Mat::from_fn(d, d, |i, j| m.get((i + d - a % d) % d, (j + d - a % d) % d).clone())
}

/// Largest entry of V*V − I, or `None` when V is unitary (exactly, or within
/// tolerance for floating backends).
pub fn unitary_defect<T: Scalar>(v: &Mat<T>) -> Option<f64> {
    if !v.is_square() {
        return Some(f64::INFINITY);
    }
    let g = &v.adjoint() * v;
    let id = Mat::identity(v.rows());
    let bad = g.data().iter().zip(id.data()).any(|(a, b)| !a.approx_eq(b));
    bad.then(|| g.max_defect(&id, Scalar::magnitude))
}

/// A_m = S^{−(m−1)}·(t ⊕ V_m)·S^{m−1} with N = d − 1 + t².
pub fn partial_isometry_family<T: Scalar>(t: &T, vs: &[Mat<T>]) -> Result<KrausSet<T>> {
    let d = vs.len();
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let mut generators = Vec::with_capacity(d);
    for (m, v) in vs.iter().enumerate() {
        if v.shape() != (d - 1, d - 1) {
            return Err(Error::Shape(format!("V_{} is {}x{}, expected {}x{}", m + 1, v.rows(), v.cols(), d - 1, d - 1)));
        }
        if let Some(defect) = unitary_defect(v) {
            return Err(Error::NotUnitary(defect));
        }
        let block = Mat::from_rows(alloc::vec![alloc::vec![t.clone()]])?.direct_sum(v);
        generators.push(conjugate_by_shift(&block, m));
    }
    let norm = T::from_int(d as i64 - 1).plus(&t.times(t));
    KrausSet::new(d, generators, norm)
}

fn unit<T: Ring>(d: usize, i: usize, j: usize, c: T) -> Mat<T> {
    Mat::unit(d, i, j).scale(&c)
}

fn sum<T: Ring>(d: usize, terms: Vec<Mat<T>>) -> Mat<T> {
    terms.iter().fold(Mat::zeros(d, d), |acc, m| &acc + m)
}

fn alpha_beta_generators(alpha: &ExScalar, beta: &ExScalar) -> Vec<Mat<ExScalar>> {
    let one = ExScalar::one;
    alloc::vec![
        sum(3, alloc::vec![unit(3, 0, 0, alpha.clone()), unit(3, 1, 2, one())]),
        sum(3, alloc::vec![unit(3, 0, 2, beta.clone()), unit(3, 2, 1, one())]),
        sum(3, alloc::vec![unit(3, 0, 1, one().negated()), unit(3, 2, 0, beta.conj().negated())]),
        sum(3, alloc::vec![unit(3, 1, 0, one()), unit(3, 2, 2, alpha.conj())]),
    ]
}

fn arveson_ohno_generators() -> Vec<Mat<ExScalar>> {
    let (one, r2, r3) = (ExScalar::one(), ExScalar::sqrt2(), ExScalar::sqrt3());
    alloc::vec![
        unit(3, 0, 0, one.clone()),
        sum(3, alloc::vec![unit(3, 0, 1, one.clone()), unit(3, 1, 2, r2.clone())]),
        sum(3, alloc::vec![unit(3, 1, 0, r2.clone()), unit(3, 2, 1, r3)]),
        sum(3, alloc::vec![unit(3, 2, 0, one), unit(3, 0, 2, r2)]),
    ]
}

/// A_1 = a·(I − E_11), A_k = b·(E_1k + E_k1).
fn ohno_generators<T: Ring>(d: usize, a: &T, b: &T) -> Vec<Mat<T>> {
    let mut gens = alloc::vec![(&Mat::identity(d) - &Mat::unit(d, 0, 0)).scale(a)];
    gens.extend((1..d).map(|k| (&Mat::unit(d, 0, k) + &Mat::unit(d, k, 0)).scale(b)));
    gens
}

fn d6_generators() -> Vec<Mat<ExScalar>> {
    let h = ExScalar::from_frac(1, 2);
    let e = |v: i64| ExScalar::from_int(v).times(&h);
    let x = Mat::from_fn(2, 2, |i, j| e(if i == j { -1 } else { 1 }));
    let y = Mat::from_fn(2, 2, |_, _| e(1));
    let z = Mat::<ExScalar>::zeros(2, 2);
    let grid =
        |rows: [[&Mat<ExScalar>; 3]; 3]| Mat::from_blocks(&rows.map(|r| r.map(Clone::clone).to_vec())).expect("3x3 grid of 2x2 blocks");
    alloc::vec![
        grid([[&x, &y, &z], [&y, &x, &z], [&z, &z, &z]]),
        grid([[&x, &z, &y], [&z, &z, &z], [&y, &z, &x]]),
        grid([[&z, &z, &z], [&z, &x, &y], [&z, &y, &x]]),
    ]
}

fn ohno_exact(d: usize) -> Result<KrausSet<ExScalar>> {
    if d < 3 {
        return Err(Error::BadDimension(d));
    }
    let n = d as i64;
    let a = ExScalar::sqrt_of_rational(&crate::field::rat(n - 2, n - 1));
    let b = ExScalar::sqrt_of_rational(&crate::field::rat(1, n - 1));
    match (a, b) {
        (Some(a), Some(b)) => KrausSet::new(d, ohno_generators(d, &a, &b), ExScalar::one()),
        _ => {
            Err(Error::BadParameters(format!("ohno_lowrank at d = {d} needs square roots outside the exact field; use the float backend")))
        }
    }
}

fn required_t(spec: &FamilySpec) -> Result<ExScalar> {
    spec.t.clone().ok_or_else(|| Error::BadParameters(format!("{} needs a value of t", spec.family)))
}

/// Builds a family member over the exact field.
pub fn build_family(spec: &FamilySpec) -> Result<KrausSet<ExScalar>> {
    match spec.family {
        f if f.is_partial_isometry() => partial_isometry_family(&required_t(spec)?, &spec.unitaries()?),
        FamilyName::UcptAlphaBeta => {
            spec.expect_d(3)?;
            let missing = || Error::BadParameters(String::from("ucpt_alpha_beta needs alpha and beta"));
            let alpha = spec.alpha.clone().ok_or_else(missing)?;
            let beta = spec.beta.clone().ok_or_else(missing)?;
            let total = alpha.abs_sq().plus(&beta.abs_sq());
            if !total.is_one() {
                return Err(Error::BadParameters(format!("|alpha|^2 + |beta|^2 = {total}, not 1")));
            }
            KrausSet::new(3, alpha_beta_generators(&alpha, &beta), ExScalar::from_int(2))
        }
        FamilyName::ArvesonOhno => {
            spec.expect_d(3)?;
            Ok(KrausSet::new(3, arveson_ohno_generators(), ExScalar::from_int(4))?.inferred())
        }
        FamilyName::OhnoLowrank => ohno_exact(spec.d),
        FamilyName::D6Xy => {
            spec.expect_d(6)?;
            Ok(KrausSet::new(6, d6_generators(), ExScalar::from_int(2))?.inferred())
        }
        _ => unreachable!("partial-isometry families handled above"),
    }
}

/// Builds a family member with `t` left as the polynomial variable.
/// Families without a parameter come back as constant polynomials.
pub fn build_family_symbolic(spec: &FamilySpec) -> Result<KrausSet<TPoly>> {
    if spec.family.is_partial_isometry() {
        let vs: Vec<Mat<TPoly>> = spec.unitaries()?.iter().map(|v| v.map(|x| TPoly::constant(x.clone()))).collect();
        return partial_isometry_family(&TPoly::var(), &vs);
    }
    Ok(build_family(spec)?.map(|x| TPoly::constant(x.clone())))
}

/// Builds a family member in complex doubles; needed for ohno_lowrank when d > 5.
pub fn build_family_float(spec: &FamilySpec) -> Result<KrausSet<C64>> {
    if spec.family == FamilyName::OhnoLowrank && spec.d >= 3 {
        let n = spec.d as f64;
        let a = C64::new(libm::sqrt((n - 2.0) / (n - 1.0)), 0.0);
        let b = C64::new(libm::sqrt(1.0 / (n - 1.0)), 0.0);
        return KrausSet::new(spec.d, ohno_generators(spec.d, &a, &b), C64::one());
    }
    Ok(build_family(spec)?.to_float())
}

fn check_square<T: Ring>(k: &KrausSet<T>, rho: &Mat<T>) -> Result<()> {
    if rho.shape() != (k.d, k.d) {
        return Err(Error::Shape(format!("state is {}x{}, channel acts on {}x{}", rho.rows(), rho.cols(), k.d, k.d)));
    }
    Ok(())
}

/// Φ(ρ) = (1/N)·Σ A_k* ρ A_k.
pub fn apply_channel<T: Field>(k: &KrausSet<T>, rho: &Mat<T>) -> Result<Mat<T>> {
    check_square(k, rho)?;
    let total = k.generators.iter().fold(Mat::zeros(k.d, k.d), |acc, a| &acc + &(&(&a.adjoint() * rho) * a));
    Ok(total.scale(&k.norm_sq.inv()?))
}

/// The adjoint Φ*(ρ) = (1/N)·Σ A_k ρ A_k*.
pub fn apply_adjoint<T: Field>(k: &KrausSet<T>, rho: &Mat<T>) -> Result<Mat<T>> {
    check_square(k, rho)?;
    let total = k.generators.iter().fold(Mat::zeros(k.d, k.d), |acc, a| &acc + &(&(a * rho) * &a.adjoint()));
    Ok(total.scale(&k.norm_sq.inv()?))
}

/// Σ_ij E_ij ⊗ Φ(E_ij); trace d for a trace-preserving channel.
pub fn choi_matrix<T: Field>(k: &KrausSet<T>) -> Result<Mat<T>> {
    let d = k.d;
    let inv = k.norm_sq.inv()?;
    // Entry ((i,a),(j,b)) is (1/N)·Σ_m conj(A_m[i][a])·A_m[j][b].
    Ok(Mat::from_fn(d * d, d * d, |r, c| {
        let (i, a, j, b) = (r / d, r % d, c / d, c % d);
        k.generators.iter().fold(T::zero(), |acc, m| acc.plus(&m.get(i, a).conj().times(m.get(j, b)))).times(&inv)
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Choi<T: Ring> {
    pub matrix: Mat<T>,
    pub rank: usize,
}

pub fn choi<T: Field + MatrixRank>(k: &KrausSet<T>) -> Result<Choi<T>> {
    let matrix = choi_matrix(k)?;
    let rank = T::matrix_rank(&matrix);
    Ok(Choi { matrix, rank })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UcptCheck {
    pub unital: bool,
    pub trace_preserving: bool,
}

impl UcptCheck {
    pub fn is_ucpt(self) -> bool {
        self.unital && self.trace_preserving
    }
}

/// Σ A_k*A_k = N·I (unital) and Σ A_kA_k* = N·I (trace preserving).
pub fn check_ucpt<T: Scalar>(k: &KrausSet<T>) -> UcptCheck {
    let target = Mat::identity(k.d).scale(&k.norm_sq);
    let matches = |m: &Mat<T>| m.data().iter().zip(target.data()).all(|(a, b)| a.approx_eq(b));
    let (left, right) = k.gram_sums();
    UcptCheck { unital: matches(&left), trace_preserving: matches(&right) }
}

/// Generators X_j = Σ_k w_jk·A_k with the same normalization. A unitary W
/// leaves the channel unchanged.
pub fn remix<T: Ring>(k: &KrausSet<T>, w: &Mat<T>) -> Result<KrausSet<T>> {
    if w.shape() != (k.len(), k.len()) {
        return Err(Error::Shape(format!("{}x{} mixing matrix for {} generators", w.rows(), w.cols(), k.len())));
    }
    let gens = (0..k.len()).map(|j| (0..k.len()).fold(Mat::zeros(k.d, k.d), |acc, m| &acc + &k.generators[m].scale(w.get(j, m)))).collect();
    KrausSet::new(k.d, gens, k.norm_sq.clone())
}
