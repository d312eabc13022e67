//! Extremality through linear independence of operator products.
//!
//! A channel with Kraus operators {A_k} is extreme among unital CP maps iff
//! {A_m*A_n} is linearly independent, among trace-preserving CP maps iff
//! {A_mA_n*} is, and among UCPT maps iff {A_j*A_k ⊕ A_kA_j*} is.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::channels::{build_family, build_family_symbolic, partial_isometry_family, unitary_defect, FamilySpec, KrausSet};
use crate::field::{find_roots, rat, RootReport};
use crate::linalg::{det_poly, float_rank, modular_rank, rank_nullspace, MatrixRank};
use crate::{Error, ExScalar, Field, Mat, Result, Ring, TPoly, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    /// {A_m*A_n}: unital CP extremality.
    AstarA,
    /// {A_mA_n*}: trace-preserving CP extremality.
    AAstar,
    /// {A_j*A_k ⊕ A_kA_j*}: UCPT extremality.
    LandauStreater,
}

impl SetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SetKind::AstarA => "AstarA",
            SetKind::AAstar => "AAstar",
            SetKind::LandauStreater => "LandauStreater",
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SetKind {
    type Err = Error;

    /// Also accepts `LS` for the Landau–Streater set.
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("LS") {
            return Ok(SetKind::LandauStreater);
        }
        [SetKind::AstarA, SetKind::AAstar, SetKind::LandauStreater]
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::BadParameters(format!("unknown set kind {s:?}")))
    }
}

/// Products in lexicographic (m, n) order. Landau–Streater elements are the
/// 2d×2d block-diagonal matrices A_m*A_n ⊕ A_nA_m*.
pub fn product_set<T: Ring>(k: &KrausSet<T>, kind: SetKind) -> Vec<Mat<T>> {
    let gens = k.generators();
    let adj: Vec<Mat<T>> = gens.iter().map(Mat::adjoint).collect();
    let mut out = Vec::with_capacity(gens.len() * gens.len());
    for m in 0..gens.len() {
        for n in 0..gens.len() {
            out.push(match kind {
                SetKind::AstarA => &adj[m] * &gens[n],
                SetKind::AAstar => &gens[m] * &adj[n],
                SetKind::LandauStreater => (&adj[m] * &gens[n]).direct_sum(&(&gens[n] * &adj[m])),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceVerdict {
    pub set_kind: Option<SetKind>,
    pub independent: bool,
    pub rank: usize,
    pub expected: usize,
    /// Coefficients c with Σ c_i·M_i = 0, first nonzero entry 1; present iff dependent.
    pub witness: Option<Vec<ExScalar>>,
    /// Dimension of the space of all such relations.
    pub nullity: usize,
}

/// Gram matrix g_ab = Tr(M_b·M_a*).
pub fn gram<T: Ring>(mats: &[Mat<T>]) -> Result<Mat<T>> {
    let n = mats.len();
    let mut g = Mat::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = mats[b].hs_inner(&mats[a])?;
            g.set(b, a, v.conj());
            g.set(a, b, v);
        }
    }
    Ok(g)
}

fn normalize(v: &[ExScalar]) -> Result<Vec<ExScalar>> {
    let lead = v.iter().find(|x| !x.is_zero()).ok_or(Error::DivideByZero)?.inv()?;
    Ok(v.iter().map(|x| x.times(&lead)).collect())
}

/// Σ c_i·M_i.
pub fn combination<T: Ring>(mats: &[Mat<T>], c: &[T]) -> Result<Mat<T>> {
    let (r, cc) = mats.first().map_or((0, 0), Mat::shape);
    mats.iter().zip(c).try_fold(Mat::zeros(r, cc), |acc, (m, x)| acc.try_add(&m.scale(x)))
}

/// Exact rank of the Gram matrix, with a verified relation when dependent.
/// Full rank modulo a prime is tried first; it certifies independence.
pub fn independence(mats: &[Mat<ExScalar>]) -> Result<IndependenceVerdict> {
    if let Some(first) = mats.first() {
        if let Some(bad) = mats.iter().find(|m| m.shape() != first.shape()) {
            return Err(Error::Shape(format!("{}x{} among {}x{}", bad.rows(), bad.cols(), first.rows(), first.cols())));
        }
    }
    let (r, c) = mats.first().map_or((0, 0), Mat::shape);
    let rows = Mat::from_fn(mats.len(), r * c, |i, j| mats[i].get(j / c, j % c).clone());
    if modular_rank(&rows) == Some(mats.len()) {
        let n = mats.len();
        return Ok(IndependenceVerdict { set_kind: None, independent: true, rank: n, expected: n, witness: None, nullity: 0 });
    }
    let rn = rank_nullspace(&gram(mats)?);
    let witness = match rn.nullspace.first() {
        Some(v) => {
            let c = normalize(v)?;
            if !combination(mats, &c)?.is_zero() {
                return Err(Error::BadParameters(String::from("dependence witness failed exact re-verification")));
            }
            Some(c)
        }
        None => None,
    };
    Ok(IndependenceVerdict {
        set_kind: None,
        independent: rn.rank == mats.len(),
        rank: rn.rank,
        expected: mats.len(),
        witness,
        nullity: rn.nullspace.len(),
    })
}

/// Generators forming a basis of their span. Any Kraus family of the same
/// channel spans the same space, and an invertible change of generators acts
/// invertibly on every product set, so verdicts are taken on this subset.
pub fn independent_generators<T: Field + MatrixRank>(k: &KrausSet<T>) -> Result<KrausSet<T>> {
    let d = k.d();
    let cols = Mat::from_fn(d * d, k.len(), |r, c| k.generators()[c].get(r / d, r % d).clone());
    let mut keep = Vec::new();
    let mut rank = 0;
    for c in 0..k.len() {
        let trial: Vec<usize> = keep.iter().copied().chain([c]).collect();
        let sub = Mat::from_fn(d * d, trial.len(), |r, j| cols.get(r, trial[j]).clone());
        let r = T::matrix_rank(&sub);
        if r > rank {
            rank = r;
            keep.push(c);
        }
    }
    KrausSet::new(d, keep.iter().map(|&c| k.generators()[c].clone()).collect(), k.norm_sq().clone())
}

pub fn set_independence(k: &KrausSet<ExScalar>, kind: SetKind) -> Result<IndependenceVerdict> {
    let mut v = independence(&product_set(k, kind))?;
    v.set_kind = Some(kind);
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtremalityVerdict {
    pub ucp_extreme: bool,
    pub cpt_extreme: bool,
    pub ucpt_extreme_ls: bool,
    /// Number of linearly independent generators actually tested.
    pub kraus_rank: usize,
    /// Extreme in UCP or CPT implies extreme in UCPT.
    pub consistent: bool,
}

pub fn extremality_verdict(k: &KrausSet<ExScalar>) -> Result<ExtremalityVerdict> {
    let basis = independent_generators(k)?;
    let ucp = set_independence(&basis, SetKind::AstarA)?.independent;
    let cpt = set_independence(&basis, SetKind::AAstar)?.independent;
    let ls = set_independence(&basis, SetKind::LandauStreater)?.independent;
    let consistent = !(ucp || cpt) || ls;
    debug_assert!(consistent);
    Ok(ExtremalityVerdict { ucp_extreme: ucp, cpt_extreme: cpt, ucpt_extreme_ls: ls, kraus_rank: basis.len(), consistent })
}

/// Numerical rank of the Gram matrix, for floating samples.
pub fn float_independence(mats: &[Mat<C64>], tol_rel: f64) -> Result<(usize, usize)> {
    Ok((float_rank(&gram(mats)?, tol_rel), mats.len()))
}

/// Largest d for explicit polynomial determinants.
pub const MAX_POLY_DET_DIM: usize = 5;

fn symbolic(spec: &FamilySpec) -> Result<KrausSet<TPoly>> {
    if spec.d > MAX_POLY_DET_DIM {
        return Err(Error::ExplicitTooLarge(spec.d * spec.d));
    }
    build_family_symbolic(spec)
}

fn unit_interval() -> (crate::Rational, crate::Rational) {
    (rat(-1, 1), rat(1, 1))
}

/// det of the Gram matrix of the product set as a polynomial in t, with a
/// root report over (−1, 1). Its degree is at most 2d(d+1).
pub fn gram_det_poly(spec: &FamilySpec, kind: SetKind) -> Result<RootReport> {
    let k = symbolic(spec)?;
    let det = det_poly(&gram(&product_set(&k, kind))?)?;
    let mut report = find_roots(&det, unit_interval());
    report.degree_bound = Some(2 * spec.d * (spec.d + 1));
    Ok(report)
}

/// det of the matrix whose rows are the row-major vectorizations of the
/// products. Its degree is at most d(d+1), and its roots are those of the
/// Gram determinant.
pub fn vec_det_poly(spec: &FamilySpec, kind: SetKind) -> Result<RootReport> {
    let k = symbolic(spec)?;
    let mats = product_set(&k, kind);
    let cols = mats.first().map_or(0, |m| m.rows() * m.cols());
    if mats.len() != cols {
        return Err(Error::Shape(format!("{} products of {} entries do not form a square matrix", mats.len(), cols)));
    }
    let f = Mat::from_fn(mats.len(), cols, |r, c| mats[r].data()[c].clone());
    let det = det_poly(&f)?;
    let mut report = find_roots(&det, unit_interval());
    report.degree_bound = Some(spec.d * (spec.d + 1));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingCheck {
    pub degree_bound: usize,
    /// Distinct sample points tried, one more than the degree bound when the
    /// determinant vanishes at all of them.
    pub samples: usize,
    /// First sample where the product set is independent.
    pub nonvanishing_at: Option<ExScalar>,
}

impl VanishingCheck {
    /// A polynomial of degree ≤ n with n + 1 roots is zero.
    pub fn identically_zero(&self) -> bool {
        self.nonvanishing_at.is_none() && self.samples > self.degree_bound
    }
}

/// Decides whether det G(t) vanishes identically without expanding it: a
/// nonzero polynomial of degree ≤ 2d(d+1) cannot vanish at 2d(d+1) + 1
/// distinct points. Works for any d.
pub fn det_vanishes_identically(spec: &FamilySpec, kind: SetKind) -> Result<VanishingCheck> {
    if !spec.family.is_partial_isometry() {
        return Err(Error::BadParameters(format!("{} has no parameter t", spec.family)));
    }
    let degree_bound = 2 * spec.d * (spec.d + 1);
    let vs = spec.unitaries()?;
    for s in 0..=degree_bound {
        let t = ExScalar::from_frac(2 * s as i64 - degree_bound as i64, degree_bound as i64 + 1);
        let k = partial_isometry_family(&t, &vs)?;
        let prods = product_set(&k, kind);
        if ExScalar::matrix_rank(&gram(&prods)?) == prods.len() {
            return Ok(VanishingCheck { degree_bound, samples: s + 1, nonvanishing_at: Some(t) });
        }
    }
    Ok(VanishingCheck { degree_bound, samples: degree_bound + 1, nonvanishing_at: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandProfile {
    /// max |j − k| over nonzero entries.
    pub beta: usize,
    /// Cyclic band width: the same with distances taken mod d.
    pub mu: usize,
}

pub fn band_width<T: Ring>(m: &Mat<T>) -> Result<BandProfile> {
    if !m.is_square() {
        return Err(Error::Shape(format!("band width of a {}x{} matrix", m.rows(), m.cols())));
    }
    let d = m.rows();
    let (mut beta, mut mu) = (0, 0);
    for j in 0..d {
        for k in 0..d {
            if !m.get(j, k).is_zero() {
                beta = beta.max(j.abs_diff(k));
                let r = (k + d - j) % d;
                mu = mu.max(r.min(d - r));
            }
        }
    }
    Ok(BandProfile { beta, mu })
}

/// Sampled parameter values for banded dependence.
pub fn band_sample_ts() -> Vec<ExScalar> {
    [(-3, 4), (-1, 3), (0, 1), (2, 5), (5, 7)].into_iter().map(|(n, d)| ExScalar::from_frac(n, d)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandedDependence {
    /// (t, rank of {A_m*A_n}) at each sampled t.
    pub samples: Vec<(ExScalar, usize)>,
    pub expected: usize,
    /// Largest cyclic band width of any A_m*A_n over all samples.
    pub max_product_mu: usize,
    /// 2·max_product_mu < d − 1: every product lies in a proper subspace.
    pub mu_certificate: bool,
}

impl BandedDependence {
    pub fn dependent_everywhere(&self) -> bool {
        self.samples.iter().all(|(_, r)| *r < self.expected)
    }
}

/// Narrow-band unitaries give dependent {A_m*A_n} for every t. Checks the
/// dependence at sampled t and the cyclic-band-width certificate.
pub fn check_banded_dependence(v_list: &[Mat<ExScalar>], d: usize) -> Result<BandedDependence> {
    if v_list.len() != d || d < 3 {
        return Err(Error::BadDimension(d));
    }
    for v in v_list {
        if let Some(defect) = unitary_defect(v) {
            return Err(Error::NotUnitary(defect));
        }
        let b = band_width(v)?.beta;
        if 4 * b >= d - 1 {
            return Err(Error::PreconditionFailed(format!("band width {b} is not below (d-1)/4 for d = {d}")));
        }
    }
    let mut samples = Vec::new();
    let mut max_mu = 0;
    for t in band_sample_ts() {
        let k = partial_isometry_family(&t, v_list)?;
        let prods = product_set(&k, SetKind::AstarA);
        for p in &prods {
            max_mu = max_mu.max(band_width(p)?.mu);
        }
        samples.push((t, rank_nullspace(&gram(&prods)?).rank));
    }
    Ok(BandedDependence { samples, expected: d * d, max_product_mu: max_mu, mu_certificate: 2 * max_mu < d - 1 })
}

/// Exact verdict for a spec at its own t.
pub fn family_independence(spec: &FamilySpec, kind: SetKind) -> Result<IndependenceVerdict> {
    set_independence(&build_family(spec)?, kind)
}
