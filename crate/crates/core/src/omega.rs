//! Symmetric and antisymmetric reductions of the key family's product set.
//!
//! For the key family the d² products A_mA_n are independent iff two families
//! of d(d−1)/2 matrices are, one symmetric and one antisymmetric. Each family
//! has Gram-like matrix Ω^±(x) = Ω^±(0) + x·I indexed by pairs j < k, so the
//! question becomes whether −x is an eigenvalue of Ω^±(0).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::channels::{build_family, FamilySpec, KrausSet};
use crate::extremality::independence;
use crate::linalg::rank_nullspace;
use crate::{Error, ExScalar, Field, Mat, Result, Ring, Scalar, TPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    fn unit<T: Ring>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => T::one().negated(),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "+" | "plus" | "sym" => Ok(Sign::Plus),
            "-" | "\u{2212}" | "minus" | "skew" => Ok(Sign::Minus),
            _ => Err(Error::BadParameters(format!("unknown sign {s:?}"))),
        }
    }
}

/// Index pairs j < k in lexicographic order.
pub fn pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect()
}

fn pair_index(d: usize, a: usize, b: usize) -> usize {
    let (j, k) = if a < b { (a, b) } else { (b, a) };
    j * (2 * d - j - 1) / 2 + (k - j - 1)
}

/// x(E_mn ± E_nm) + Σ_{j≠m,n} (E_mj ± E_jm + E_jn ± E_nj).
pub fn x_pattern<T: Ring>(d: usize, m: usize, n: usize, sign: Sign, x: &T) -> Mat<T> {
    let s: T = sign.unit();
    let mut out = Mat::zeros(d, d);
    out.set(m, n, x.clone());
    out.set(n, m, x.times(&s));
    for j in (0..d).filter(|&j| j != m && j != n) {
        out.set(m, j, T::one());
        out.set(j, m, s.clone());
        out.set(j, n, T::one());
        out.set(n, j, s.clone());
    }
    out
}

/// Upper-triangle entries in pair order.
pub fn upper_vector<T: Ring>(m: &Mat<T>) -> Vec<T> {
    pairs(m.rows()).into_iter().map(|(j, k)| m.get(j, k).clone()).collect()
}

fn omega_matrix<T: Ring>(d: usize, sign: Sign, x: &T) -> Mat<T> {
    let ps = pairs(d);
    let s: T = sign.unit();
    let mut out = Mat::zeros(ps.len(), ps.len());
    for (row, &(m, n)) in ps.iter().enumerate() {
        out.set(row, row, x.clone());
        for j in (0..d).filter(|&j| j != m && j != n) {
            out.set(row, pair_index(d, m, j), if m < j { T::one() } else { s.clone() });
            out.set(row, pair_index(d, j, n), if j < n { T::one() } else { s.clone() });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaMatrix {
    pub d: usize,
    pub sign: Sign,
    pub x: ExScalar,
    pub matrix: Mat<ExScalar>,
}

pub fn build_omega(d: usize, sign: Sign, x: &ExScalar) -> Result<OmegaMatrix> {
    if d < 3 {
        return Err(Error::BadDimension(d));
    }
    Ok(OmegaMatrix { d, sign, x: x.clone(), matrix: omega_matrix(d, sign, x) })
}

/// Ω^±(x) with x the polynomial variable.
pub fn build_omega_symbolic(d: usize, sign: Sign) -> Result<Mat<TPoly>> {
    if d < 3 {
        return Err(Error::BadDimension(d));
    }
    Ok(omega_matrix(d, sign, &TPoly::var()))
}

#[derive(Debug, Clone)]
pub struct XTransform {
    pub d: usize,
    pub t: ExScalar,
    pub m: usize,
    pub n: usize,
    /// (d−1)²A_mA_n + 4J with its diagonal removed.
    pub x_mn: Mat<ExScalar>,
    pub x_plus: Mat<ExScalar>,
    /// Unscaled X_mn − X_nm when the normalizer vanishes.
    pub x_minus: Mat<ExScalar>,
    pub w_plus: ExScalar,
    /// None exactly when t = (d−3)/(d−1).
    pub w_minus: Option<ExScalar>,
}

fn int(n: i64) -> ExScalar {
    ExScalar::from(n)
}

fn frac(n: i64, d: i64) -> ExScalar {
    ExScalar::from_frac(n, d)
}

/// Reads t off a key family and checks the family really is the key family.
fn key_parameter(k: &KrausSet<ExScalar>) -> Result<ExScalar> {
    let t = k.generators().first().ok_or_else(|| Error::BadParameters(String::from("empty Kraus set")))?.get(0, 0).clone();
    let expected = build_family(&FamilySpec::key(k.d(), t.clone()))?;
    if expected.generators() != k.generators() {
        return Err(Error::BadParameters(String::from("Kraus set is not the key family")));
    }
    Ok(t)
}

fn shifted_product(gens: &[Mat<ExScalar>], d: usize, m: usize, n: usize) -> Mat<ExScalar> {
    let scale = int(((d - 1) * (d - 1)) as i64);
    let four = int(4);
    let mut x = (&gens[m] * &gens[n]).scale(&scale);
    for i in 0..d {
        for j in 0..d {
            let v = if i == j { ExScalar::zero() } else { x.get(i, j).plus(&four) };
            x.set(i, j, v);
        }
    }
    x
}

pub fn w_plus(d: usize, t: &ExScalar) -> Result<ExScalar> {
    let den = int(d as i64 + 1).plus(&t.times(&int(d as i64 - 1)));
    int(2 * d as i64).div(&den)
}

pub fn w_minus(d: usize, t: &ExScalar) -> Result<ExScalar> {
    let den = int(d as i64 - 3).minus(&t.times(&int(d as i64 - 1)));
    int(2 * (d as i64 - 2)).div(&den)
}

pub fn xmn_transform(k: &KrausSet<ExScalar>, m: usize, n: usize) -> Result<XTransform> {
    let d = k.d();
    if m == n || m >= d || n >= d {
        return Err(Error::BadIndices(m, n));
    }
    let t = key_parameter(k)?;
    let gens = k.generators();
    let x_mn = shifted_product(gens, d, m, n);
    let x_nm = shifted_product(gens, d, n, m);
    let a_hat = int(2 * (d as i64 - 1));
    let b_hat = int(4).plus(&t.times(&int(2 * (d as i64 - 1))));
    let sum = &x_mn + &x_nm;
    let diff = &x_mn - &x_nm;
    let plus_norm = b_hat.plus(&a_hat);
    if plus_norm.is_zero() {
        return Err(Error::PreconditionFailed(format!("b + a vanishes at t = {t}")));
    }
    let x_plus = sum.scale(&plus_norm.inv()?);
    let minus_norm = b_hat.minus(&a_hat);
    let (x_minus, w_minus) = if minus_norm.is_zero() { (diff, None) } else { (diff.scale(&minus_norm.inv()?), Some(w_minus(d, &t)?)) };
    Ok(XTransform { d, w_plus: w_plus(d, &t)?, t, m, n, x_mn, x_plus, x_minus, w_minus })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumClaim {
    pub eigenvalue: ExScalar,
    pub claimed_multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCheck {
    pub claim: SpectrumClaim,
    /// Nullity of Ω(0) − λI.
    pub computed_multiplicity: usize,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub d: usize,
    pub sign: Sign,
    pub checks: Vec<SpectrumCheck>,
    pub dimension: usize,
    /// Computed multiplicities add up to the full dimension.
    pub exhaustive: bool,
}

impl SpectrumReport {
    pub fn verified(&self) -> bool {
        self.exhaustive && self.checks.iter().all(|c| c.verified)
    }
}

pub fn spectrum_claims(d: usize, sign: Sign) -> Vec<SpectrumClaim> {
    let di = d as i64;
    let claim = |v: i64, mult: usize| SpectrumClaim { eigenvalue: int(v), claimed_multiplicity: mult };
    match sign {
        Sign::Minus => vec![claim(di - 2, d - 1), claim(-2, (d - 2) * (d - 1) / 2)],
        Sign::Plus => vec![claim(2 * (di - 2), 1), claim(di - 4, d - 1), claim(-2, d * (d - 3) / 2)],
    }
}

pub const MAX_SPECTRUM_DIM: usize = 8;

pub fn verify_spectrum(d: usize, sign: Sign) -> Result<SpectrumReport> {
    if !(3..=MAX_SPECTRUM_DIM).contains(&d) {
        return Err(Error::BadDimension(d));
    }
    let dimension = d * (d - 1) / 2;
    let checks: Vec<SpectrumCheck> = spectrum_claims(d, sign)
        .into_iter()
        .map(|claim| {
            let shifted = build_omega(d, sign, &claim.eigenvalue.negated())?.matrix;
            let computed_multiplicity = dimension - rank_nullspace(&shifted).rank;
            Ok(SpectrumCheck { verified: computed_multiplicity == claim.claimed_multiplicity, computed_multiplicity, claim })
        })
        .collect::<Result<_>>()?;
    let total: usize = checks.iter().map(|c| c.computed_multiplicity).sum();
    Ok(SpectrumReport { d, sign, checks, dimension, exhaustive: total == dimension })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenCase {
    /// Ω⁻ at x = 2 − d.
    Skew2MinusD,
    /// Ω⁻ at x = 2.
    Skew2,
    /// Ω⁺ at x = 2(2 − d).
    SymTwice2MinusD,
    /// Ω⁺ at x = 4 − d.
    Sym4MinusD,
    /// Ω⁺ at x = 2.
    Sym2,
}

impl EigenCase {
    pub const ALL: [EigenCase; 5] =
        [EigenCase::Skew2MinusD, EigenCase::Skew2, EigenCase::SymTwice2MinusD, EigenCase::Sym4MinusD, EigenCase::Sym2];

    pub fn as_str(self) -> &'static str {
        match self {
            EigenCase::Skew2MinusD => "skew_2_minus_d",
            EigenCase::Skew2 => "skew_2",
            EigenCase::SymTwice2MinusD => "sym_2(2-d)",
            EigenCase::Sym4MinusD => "sym_4_minus_d",
            EigenCase::Sym2 => "sym_2",
        }
    }

    pub fn sign(self) -> Sign {
        match self {
            EigenCase::Skew2MinusD | EigenCase::Skew2 => Sign::Minus,
            _ => Sign::Plus,
        }
    }

    /// The x at which Ω(x) is singular on this eigenspace.
    pub fn x(self, d: usize) -> ExScalar {
        let di = d as i64;
        int(match self {
            EigenCase::Skew2MinusD => 2 - di,
            EigenCase::Skew2 | EigenCase::Sym2 => 2,
            EigenCase::SymTwice2MinusD => 2 * (2 - di),
            EigenCase::Sym4MinusD => 4 - di,
        })
    }

    pub fn expected_count(self, d: usize) -> usize {
        match self {
            EigenCase::Skew2MinusD | EigenCase::Sym4MinusD => d - 1,
            EigenCase::Skew2 => (d - 1) * (d - 2) / 2,
            EigenCase::SymTwice2MinusD => 1,
            EigenCase::Sym2 => d * (d - 3) / 2,
        }
    }
}

impl fmt::Display for EigenCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EigenCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().replace('\u{2212}', "-");
        match norm.as_str() {
            "sym_2_times_2_minus_d" | "sym_4_minus_2d" => return Ok(EigenCase::SymTwice2MinusD),
            _ => {}
        }
        EigenCase::ALL.into_iter().find(|c| c.as_str() == norm).ok_or_else(|| Error::BadCase(String::from(s)))
    }
}

#[derive(Debug, Clone)]
pub struct Eigenbasis {
    pub d: usize,
    pub case: EigenCase,
    pub x: ExScalar,
    pub basis: Vec<Mat<ExScalar>>,
    pub in_nullspace: bool,
    pub independent: bool,
    pub expected_count: usize,
}

impl Eigenbasis {
    pub fn verified(&self) -> bool {
        self.in_nullspace && self.independent && self.basis.len() == self.expected_count
    }
}

fn accumulate(m: &mut Mat<ExScalar>, i: usize, j: usize, c: i64) {
    let v = m.get(i, j).plus(&int(c));
    m.set(i, j, v);
}

fn basis_matrices(d: usize, case: EigenCase) -> Vec<Mat<ExScalar>> {
    match case {
        EigenCase::Skew2MinusD => (1..d)
            .map(|k| {
                let mut c = Mat::zeros(d, d);
                for j in (0..d).filter(|&j| j != k) {
                    accumulate(&mut c, k, j, 1);
                    accumulate(&mut c, j, k, -1);
                }
                c
            })
            .collect(),
        EigenCase::Skew2 => pairs(d)
            .into_iter()
            .filter(|&(j, _)| j > 0)
            .map(|(j, k)| {
                let mut c = Mat::zeros(d, d);
                for (a, b, v) in [(0, j, 1), (j, 0, -1), (0, k, -1), (k, 0, 1), (j, k, 1), (k, j, -1)] {
                    accumulate(&mut c, a, b, v);
                }
                c
            })
            .collect(),
        EigenCase::SymTwice2MinusD => vec![Mat::from_fn(d, d, |i, j| int(i64::from(i != j)))],
        EigenCase::Sym4MinusD => (1..d)
            .map(|k| {
                let mut c = Mat::zeros(d, d);
                for j in (1..d).filter(|&j| j != k) {
                    accumulate(&mut c, 0, j, 1);
                    accumulate(&mut c, j, 0, 1);
                    accumulate(&mut c, k, j, -1);
                    accumulate(&mut c, j, k, -1);
                }
                c
            })
            .collect(),
        EigenCase::Sym2 => {
            // B_{jk,mn} = E_mj − E_mk − E_nj + E_nk, symmetrized.
            let sym_b = |j: usize, k: usize, m: usize, n: usize| {
                let mut c = Mat::zeros(d, d);
                for (a, b, v) in [(m, j, 1), (m, k, -1), (n, j, -1), (n, k, 1)] {
                    accumulate(&mut c, a, b, v);
                    accumulate(&mut c, b, a, v);
                }
                c
            };
            let mut out: Vec<Mat<ExScalar>> = pairs(d).into_iter().filter(|&(n, _)| n >= 2).map(|(n, k)| sym_b(1, k, 0, n)).collect();
            out.extend((3..d).map(|k| sym_b(2, k, 0, 1)));
            out
        }
    }
}

/// Explicit null vectors of Ω(x), each checked exactly.
pub fn eigenbasis(d: usize, case: EigenCase) -> Result<Eigenbasis> {
    if d < 4 {
        return Err(Error::BadDimension(d));
    }
    let x = case.x(d);
    let omega = build_omega(d, case.sign(), &x)?.matrix;
    let basis = basis_matrices(d, case);
    let s: ExScalar = case.sign().unit();
    let in_nullspace = basis.iter().all(|c| {
        let symmetric = *c == c.transpose().scale(&s);
        let v = Mat::from_vec(omega.rows(), 1, upper_vector(c)).expect("pair count");
        symmetric && (&omega * &v).is_zero()
    });
    let vectors: Vec<Mat<ExScalar>> = basis.iter().map(|c| Mat::from_vec(1, omega.rows(), upper_vector(c)).expect("pair count")).collect();
    let independent = independence(&vectors)?.independent;
    Ok(Eigenbasis { d, case, x, expected_count: case.expected_count(d), basis, in_nullspace, independent })
}

/// One verified identity; `residual` is the largest entry over all instances.
#[derive(Debug, Clone, PartialEq)]
pub struct Identity {
    pub name: String,
    pub instances: usize,
    pub residual: ExScalar,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub d: usize,
    pub identities: Vec<Identity>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|i| i.holds)
    }

    pub fn get(&self, name: &str) -> Option<&Identity> {
        self.identities.iter().find(|i| i.name == name)
    }
}

fn largest_entry<'a>(ms: impl IntoIterator<Item = &'a Mat<ExScalar>>) -> (usize, ExScalar) {
    let mut count = 0;
    let mut worst = ExScalar::zero();
    for m in ms {
        count += 1;
        for v in m.data() {
            if v.magnitude() > worst.magnitude() {
                worst = v.clone();
            }
        }
    }
    (count, worst)
}

fn identity_from(name: &str, residuals: &[Mat<ExScalar>]) -> Identity {
    let (instances, residual) = largest_entry(residuals);
    Identity { name: String::from(name), instances, holds: residual.is_zero(), residual }
}

fn count_identity(name: &str, found: usize, expected: usize) -> Identity {
    let residual = int(found as i64 - expected as i64);
    Identity { name: String::from(name), instances: 1, holds: residual.is_zero(), residual }
}

struct Products {
    gens: Vec<Mat<ExScalar>>,
    table: Vec<Vec<Mat<ExScalar>>>,
}

impl Products {
    fn new(gens: &[Mat<ExScalar>]) -> Self {
        let table = gens.iter().map(|a| gens.iter().map(|b| a * b).collect()).collect();
        Products { gens: gens.to_vec(), table }
    }

    fn p(&self, a: usize, b: usize) -> &Mat<ExScalar> {
        &self.table[a][b]
    }

    fn comm(&self, a: usize, b: usize) -> Mat<ExScalar> {
        self.p(a, b) - self.p(b, a)
    }

    fn anti(&self, a: usize, b: usize) -> Mat<ExScalar> {
        self.p(a, b) + self.p(b, a)
    }

    fn sum(&self, ms: &[Mat<ExScalar>]) -> Mat<ExScalar> {
        let d = self.gens[0].rows();
        ms.iter().fold(Mat::zeros(d, d), |acc, m| &acc + m)
    }

    fn off_diagonal_sum(&self) -> Mat<ExScalar> {
        let n = self.gens.len();
        let terms: Vec<Mat<ExScalar>> =
            (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).map(|(a, b)| self.p(a, b).clone()).collect();
        self.sum(&terms)
    }

    fn squares_independent(&self) -> Result<(usize, usize)> {
        let sq: Vec<Mat<ExScalar>> = (0..self.gens.len()).map(|a| self.p(a, a).clone()).collect();
        Ok((independence(&sq)?.rank, sq.len()))
    }

    fn span_rank(&self) -> Result<usize> {
        let all: Vec<Mat<ExScalar>> = self.table.iter().flatten().cloned().collect();
        Ok(independence(&all)?.rank)
    }
}

fn distinct_tuples(d: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..d)
                    .filter(|i| !prefix.contains(i))
                    .map(|i| {
                        let mut p = prefix.clone();
                        p.push(i);
                        p
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// 4d(d−2)(1 + t(d−1)): d times the common off-diagonal entry of (d−1)²Σ_{m≠n}A_mA_n.
pub fn pair_sum_offdiagonal(d: usize, t: &ExScalar) -> ExScalar {
    let di = d as i64;
    int(4 * di * (di - 2)).times(&int(1).plus(&t.times(&int(di - 1))))
}

/// (d−1)(d−3)((d−2)(d+1) − 2t(d−1)): the diagonal entry of (d−1)²Σ_{m≠n}A_mA_n.
pub fn pair_sum_diagonal(d: usize, t: &ExScalar) -> ExScalar {
    let di = d as i64;
    int((di - 1) * (di - 3)).times(&int((di - 2) * (di + 1)).minus(&t.times(&int(2 * (di - 1)))))
}

pub const SPECIAL_T_RANGE: core::ops::RangeInclusive<usize> = 4..=7;

pub fn special_t(d: usize) -> ExScalar {
    frac(-1, d as i64 - 1)
}

/// Dependence relations of the key family at t = −1/(d−1).
pub fn special_t_relations(d: usize, t: &ExScalar) -> Result<RelationReport> {
    if !SPECIAL_T_RANGE.contains(&d) {
        return Err(Error::BadDimension(d));
    }
    if *t != special_t(d) {
        return Err(Error::PreconditionFailed(format!("t = {t}, relations hold only at t = {}", special_t(d))));
    }
    let k = build_family(&FamilySpec::key(d, t.clone()))?;
    let pr = Products::new(k.generators());
    let mut ids = Vec::new();

    let scaled = pr.off_diagonal_sum().scale(&int(((d - 1) * (d - 1)) as i64));
    let q = pair_sum_diagonal(d, t);
    ids.push(identity_from("(d-1)^2 sum_{m!=n} A_m A_n = d(d-1)^2(d-3) I", &[&scaled - &Mat::identity(d).scale(&q)]));
    ids.push(count_identity("q_d(t) = d(d-1)^2(d-3)", 0, 0).with_residual(q.minus(&int((d * (d - 1) * (d - 1) * (d - 3)) as i64))));

    let triples = distinct_tuples(d, 3);
    let quads = distinct_tuples(d, 4);
    let three_cycle: Vec<_> = triples.iter().map(|v| pr.sum(&[pr.comm(v[0], v[1]), pr.comm(v[1], v[2]), pr.comm(v[2], v[0])])).collect();
    ids.push(identity_from("[Aj,Ak]+[Ak,Am]+[Am,Aj] = 0", &three_cycle));
    let four_cycle: Vec<_> =
        quads.iter().map(|v| pr.sum(&[pr.comm(v[0], v[1]), pr.comm(v[1], v[2]), pr.comm(v[2], v[3]), pr.comm(v[3], v[0])])).collect();
    ids.push(identity_from("[Aj,Ak]+[Ak,Am]+[Am,An]+[An,Aj] = 0", &four_cycle));
    let alternating: Vec<_> = quads
        .iter()
        .map(|v| {
            let pos = &pr.anti(v[0], v[1]) + &pr.anti(v[2], v[3]);
            let neg = &pr.anti(v[1], v[2]) + &pr.anti(v[3], v[0]);
            &pos - &neg
        })
        .collect();
    ids.push(identity_from("{Aj,Ak}-{Ak,Am}+{Am,An}-{An,Aj} = 0", &alternating));
    let g = &pr.gens;
    let difference: Vec<_> = quads.iter().map(|v| &(&g[v[0]] - &g[v[2]]) * &(&g[v[1]] - &g[v[3]])).collect();
    ids.push(identity_from("(Aj-Am)(Ak-An) = 0", &difference));

    ids.push(count_identity("dim span{A_m A_n} = 3d-2", pr.span_rank()?, 3 * d - 2));
    let (rank, len) = pr.squares_independent()?;
    ids.push(count_identity("{A_m^2} independent", rank, len));
    Ok(RelationReport { d, identities: ids })
}

impl Identity {
    fn with_residual(mut self, residual: ExScalar) -> Self {
        self.holds = residual.is_zero();
        self.residual = residual;
        self
    }
}

/// (1/4)·[[0,0,1],[1,0,0],[0,1,0]] as printed; the actual products carry no 1/4.
pub fn cyclic_permutation() -> Mat<ExScalar> {
    Mat::from_fn(3, 3, |i, j| int(i64::from(i == (j + 1) % 3)))
}

/// Exact identities of the two d = 3 key channels at t = −1/2 and t = 1.
pub fn d3_relations() -> Result<RelationReport> {
    let mut ids = Vec::new();
    let a = build_family(&FamilySpec::key(3, frac(-1, 2)))?;
    let pa = Products::new(a.generators());
    ids.push(identity_from("t=-1/2: sum_{m!=n} A_m A_n = 0", &[pa.off_diagonal_sum()]));
    ids.push(identity_from("t=-1/2: sum_{m<n} {A_m,A_n} = 0", &[pa.sum(&[pa.anti(0, 1), pa.anti(0, 2), pa.anti(1, 2)])]));
    ids.push(identity_from("t=-1/2: [A1,A2]+[A2,A3]+[A3,A1] = 0", &[pa.sum(&[pa.comm(0, 1), pa.comm(1, 2), pa.comm(2, 0)])]));
    ids.push(identity_from(
        "t=-1/2: A1A2+A2A3+A3A1 = 0 = A1A3+A3A2+A2A1",
        &[
            pa.sum(&[pa.p(0, 1).clone(), pa.p(1, 2).clone(), pa.p(2, 0).clone()]),
            pa.sum(&[pa.p(0, 2).clone(), pa.p(2, 1).clone(), pa.p(1, 0).clone()]),
        ],
    ));
    let (rank, len) = pa.squares_independent()?;
    ids.push(count_identity("t=-1/2: {A_m^2} independent", rank, len));

    let b = build_family(&FamilySpec::key(3, int(1)))?;
    let pb = Products::new(b.generators());
    let triples = distinct_tuples(3, 3);
    let anti: Vec<_> = triples.iter().map(|v| &pb.anti(v[0], v[1]) - &pb.anti(v[0], v[2])).collect();
    ids.push(identity_from("t=1: {Bj,Bk}-{Bj,Bl} = 0", &anti));
    let comm: Vec<_> = triples.iter().map(|v| &pb.comm(v[0], v[1]) + &pb.comm(v[0], v[2])).collect();
    ids.push(identity_from("t=1: [Bj,Bk]+[Bj,Bl] = 0", &comm));
    let p = cyclic_permutation();
    let pt = p.transpose();
    let forward: Vec<_> = [(0, 1), (1, 2), (2, 0)].iter().map(|&(i, j)| pb.p(i, j) - &p).collect();
    ids.push(identity_from("t=1: B1B2 = B2B3 = B3B1 = P", &forward));
    let backward: Vec<_> = [(1, 0), (2, 1), (0, 2)].iter().map(|&(i, j)| pb.p(i, j) - &pt).collect();
    ids.push(identity_from("t=1: B2B1 = B3B2 = B1B3 = P^T", &backward));
    Ok(RelationReport { d: 3, identities: ids })
}

/// Independence of the reduced families at one t, next to the eigenvalue test.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedIndependence {
    pub d: usize,
    pub t: ExScalar,
    pub plus_independent: bool,
    /// −w⁺ is an eigenvalue of Ω⁺(0).
    pub plus_singular: bool,
    pub minus_independent: Option<bool>,
    pub minus_singular: Option<bool>,
    pub products_independent: bool,
}

impl ReducedIndependence {
    /// Direct independence agrees with the eigenvalue test for each sign, and
    /// the product set is independent iff both reduced families are.
    pub fn consistent(&self) -> bool {
        let plus = self.plus_independent != self.plus_singular;
        let minus = match (self.minus_independent, self.minus_singular) {
            (Some(i), Some(s)) => i != s,
            (None, None) => true,
            _ => false,
        };
        let both = self.plus_independent && self.minus_independent.unwrap_or(false);
        plus && minus && (self.minus_independent.is_none() || both == self.products_independent)
    }
}

pub fn reduced_independence(d: usize, t: &ExScalar) -> Result<ReducedIndependence> {
    if d < 4 {
        return Err(Error::BadDimension(d));
    }
    let k = build_family(&FamilySpec::key(d, t.clone()))?;
    let transforms: Vec<XTransform> = pairs(d).into_iter().map(|(m, n)| xmn_transform(&k, m, n)).collect::<Result<_>>()?;
    let dim = transforms.len();
    let singular = |sign: Sign, w: &ExScalar| -> Result<bool> { Ok(rank_nullspace(&build_omega(d, sign, w)?.matrix).rank < dim) };
    let plus: Vec<Mat<ExScalar>> = transforms.iter().map(|x| x.x_plus.clone()).collect();
    let w_p = transforms[0].w_plus.clone();
    let (minus_independent, minus_singular) = match &transforms[0].w_minus {
        Some(w) => {
            let minus: Vec<Mat<ExScalar>> = transforms.iter().map(|x| x.x_minus.clone()).collect();
            (Some(independence(&minus)?.independent), Some(singular(Sign::Minus, w)?))
        }
        None => (None, None),
    };
    let products: Vec<Mat<ExScalar>> = Products::new(k.generators()).table.into_iter().flatten().collect();
    Ok(ReducedIndependence {
        d,
        t: t.clone(),
        plus_independent: independence(&plus)?.independent,
        plus_singular: singular(Sign::Plus, &w_p)?,
        minus_independent,
        minus_singular,
        products_independent: independence(&products)?.independent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det_poly;
    use crate::Poly;
    use proptest::prelude::*;

    fn key(d: usize, t: ExScalar) -> KrausSet<ExScalar> {
        build_family(&FamilySpec::key(d, t)).unwrap()
    }

    #[test]
    fn pair_indexing() {
        for d in 3..7 {
            for (i, (j, k)) in pairs(d).into_iter().enumerate() {
                assert_eq!(pair_index(d, j, k), i);
                assert_eq!(pair_index(d, k, j), i);
            }
        }
    }

    #[test]
    fn d3_omega_and_determinants() {
        let x = frac(7, 3);
        for sign in Sign::BOTH {
            let s = sign.unit::<ExScalar>();
            let o = build_omega(3, sign, &x).unwrap().matrix;
            let one = int(1);
            let expected = Mat::from_rows(vec![
                vec![x.clone(), one.clone(), s.clone()],
                vec![one.clone(), x.clone(), one.clone()],
                vec![s.clone(), one.clone(), x.clone()],
            ])
            .unwrap();
            assert_eq!(o, expected);
        }
        let r = int;
        let lin = |c: i64| Poly::new(vec![r(c), r(1)]);
        let plus = det_poly(&build_omega_symbolic(3, Sign::Plus).unwrap()).unwrap();
        assert_eq!(plus, Poly::new(vec![r(2), r(-3), r(0), r(1)]));
        assert_eq!(plus, lin(2).times(&lin(-1)).times(&lin(-1)));
        let minus = det_poly(&build_omega_symbolic(3, Sign::Minus).unwrap()).unwrap();
        assert_eq!(minus, Poly::new(vec![r(-2), r(-3), r(0), r(1)]));
        assert_eq!(minus, lin(-2).times(&lin(1)).times(&lin(1)));
    }

    #[test]
    fn omega_is_symmetric_shift_of_zero() {
        for d in 3..7 {
            for sign in Sign::BOTH {
                let x = frac(-5, 2);
                let o = build_omega(d, sign, &x).unwrap().matrix;
                let o0 = build_omega(d, sign, &ExScalar::zero()).unwrap().matrix;
                assert_eq!(&o - &o0, Mat::identity(o.rows()).scale(&x));
                assert_eq!(o, o.transpose());
            }
        }
    }

    #[test]
    fn omega_rows_are_reduced_families() {
        let d = 5;
        let x = frac(3, 7);
        for sign in Sign::BOTH {
            let o = build_omega(d, sign, &x).unwrap().matrix;
            for (row, (m, n)) in pairs(d).into_iter().enumerate() {
                let v = upper_vector(&x_pattern(d, m, n, sign, &x));
                assert_eq!(v.as_slice(), o.row(row));
            }
        }
    }

    #[test]
    fn w_values() {
        let d = 5;
        assert_eq!(w_plus(d, &int(-1)).unwrap(), int(5));
        assert_eq!(w_plus(d, &int(1)).unwrap(), int(1));
        assert_eq!(w_minus(d, &int(-1)).unwrap(), int(1));
        assert_eq!(w_minus(d, &int(1)).unwrap(), int(-3));
        for d in 4..9 {
            assert_eq!(w_plus(d, &special_t(d)).unwrap(), int(2));
            assert_eq!(w_minus(d, &special_t(d)).unwrap(), int(2));
        }
    }

    #[test]
    fn transform_matches_pattern() {
        for (d, t) in [(4, frac(1, 5)), (5, frac(-2, 7)), (6, int(0))] {
            let k = key(d, t.clone());
            for (m, n) in [(0, 1), (2, 0), (1, 3)] {
                let x = xmn_transform(&k, m, n).unwrap();
                assert!((0..d).all(|i| x.x_mn.get(i, i).is_zero()));
                assert_eq!(x.x_plus, x_pattern(d, m, n, Sign::Plus, &x.w_plus));
                assert_eq!(x.x_minus, x_pattern(d, m, n, Sign::Minus, x.w_minus.as_ref().unwrap()));
                let a_hat = int(2 * (d as i64 - 1));
                let b_hat = int(4).plus(&t.times(&int(2 * (d as i64 - 1))));
                let j = (0..d).find(|&j| j != m && j != n).unwrap();
                assert_eq!(*x.x_mn.get(n, j), a_hat);
                assert_eq!(*x.x_mn.get(j, m), a_hat);
                assert_eq!(*x.x_mn.get(m, j), b_hat);
                assert_eq!(*x.x_mn.get(j, n), b_hat);
                assert_eq!(*x.x_mn.get(n, m), int(4 * (d as i64 - 1)));
                assert_eq!(*x.x_mn.get(m, n), int(4));
            }
        }
    }

    #[test]
    fn degenerate_minus_branch() {
        let d = 5;
        let t = frac(2, 4);
        let x = xmn_transform(&key(d, t), 0, 2).unwrap();
        assert!(x.w_minus.is_none());
        let mut expected = Mat::zeros(d, d);
        expected.set(0, 2, int(4 * (2 - d as i64)));
        expected.set(2, 0, int(4 * (d as i64 - 2)));
        assert_eq!(x.x_minus, expected);
    }

    #[test]
    fn transform_errors() {
        let k = key(4, int(0));
        assert!(matches!(xmn_transform(&k, 1, 1), Err(Error::BadIndices(1, 1))));
        let odd = build_family(&FamilySpec::odd_swap(5, int(0))).unwrap();
        assert!(xmn_transform(&odd, 0, 1).is_err());
    }

    #[test]
    fn spectra_small() {
        let r = verify_spectrum(4, Sign::Minus).unwrap();
        assert!(r.verified());
        assert_eq!(r.checks.iter().map(|c| c.computed_multiplicity).collect::<Vec<_>>(), vec![3, 3]);
        let r = verify_spectrum(5, Sign::Plus).unwrap();
        assert_eq!(
            r.checks.iter().map(|c| (c.claim.eigenvalue.clone(), c.computed_multiplicity)).collect::<Vec<_>>(),
            vec![(int(6), 1), (int(1), 4), (int(-2), 5)]
        );
        let r = verify_spectrum(3, Sign::Plus).unwrap();
        assert!(r.verified());
        assert_eq!(r.checks[1].computed_multiplicity, 2);
        assert!(verify_spectrum(9, Sign::Plus).is_err());
    }

    #[test]
    fn spectra_all() {
        for d in 3..=MAX_SPECTRUM_DIM {
            for sign in Sign::BOTH {
                let r = verify_spectrum(d, sign).unwrap();
                assert!(r.verified(), "d={d} sign={sign}: {r:?}");
            }
        }
    }

    #[test]
    fn eigenbases() {
        for d in 4..8 {
            for case in EigenCase::ALL {
                let b = eigenbasis(d, case).unwrap();
                assert!(b.verified(), "d={d} {case}");
            }
        }
    }

    #[test]
    fn skew_basis_sum() {
        let b = eigenbasis(5, EigenCase::Skew2MinusD).unwrap();
        assert_eq!(b.basis.len(), 4);
        let mut c1 = Mat::zeros(5, 5);
        for j in 1..5 {
            c1.set(0, j, int(1));
            c1.set(j, 0, int(-1));
        }
        let total = b.basis.iter().fold(Mat::zeros(5, 5), |acc, m| &acc + m);
        assert_eq!(total, -&c1);
    }

    #[test]
    fn skew_2_entries() {
        let b = eigenbasis(4, EigenCase::Skew2).unwrap();
        assert_eq!(b.basis.len(), 3);
        for (c, (j, k)) in b.basis.iter().zip([(1, 2), (1, 3), (2, 3)]) {
            assert_eq!(*c.get(j, k), int(1));
        }
    }

    #[test]
    fn case_names() {
        for case in EigenCase::ALL {
            assert_eq!(case.as_str().parse::<EigenCase>().unwrap(), case);
        }
        assert_eq!("sym_2(2\u{2212}d)".parse::<EigenCase>().unwrap(), EigenCase::SymTwice2MinusD);
        assert!(matches!("sym_7".parse::<EigenCase>(), Err(Error::BadCase(_))));
        assert!(eigenbasis(3, EigenCase::Sym2).is_err());
    }

    #[test]
    fn pair_sum_constants() {
        for d in 4..8 {
            for t in [frac(1, 3), frac(-2, 5), special_t(d)] {
                let k = key(d, t.clone());
                let pr = Products::new(k.generators());
                let s = pr.off_diagonal_sum().scale(&int(((d - 1) * (d - 1)) as i64));
                let off = pair_sum_offdiagonal(d, &t).div(&int(d as i64)).unwrap();
                assert_eq!(*s.get(0, 1), off);
                assert_eq!(*s.get(2, 0), off);
                assert_eq!(*s.get(1, 1), pair_sum_diagonal(d, &t));
            }
            assert!(pair_sum_offdiagonal(d, &special_t(d)).is_zero());
        }
    }

    #[test]
    fn special_relations() {
        for d in SPECIAL_T_RANGE {
            let r = special_t_relations(d, &special_t(d)).unwrap();
            assert!(r.all_hold(), "{r:?}");
        }
        let r = special_t_relations(4, &frac(-1, 3)).unwrap();
        assert_eq!(r.get("(Aj-Am)(Ak-An) = 0").unwrap().instances, 24);
        assert!(matches!(special_t_relations(5, &frac(-1, 3)), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn special_relations_fail_elsewhere() {
        let k = key(4, frac(1, 5));
        let pr = Products::new(k.generators());
        assert_eq!(pr.span_rank().unwrap(), 16);
        let g = k.generators();
        assert!(!(&(&g[0] - &g[2]) * &(&g[1] - &g[3])).is_zero());
    }

    #[test]
    fn d3() {
        let r = d3_relations().unwrap();
        assert!(r.all_hold(), "{r:?}");
        assert_eq!(r.identities.len(), 9);
    }

    #[test]
    fn reduced_independence_matches_eigenvalues() {
        for d in [4, 5] {
            for t in [int(0), frac(1, 3), frac(-1, 2), special_t(d)] {
                let r = reduced_independence(d, &t).unwrap();
                assert!(r.consistent(), "{r:?}");
            }
            let r = reduced_independence(d, &special_t(d)).unwrap();
            assert!(!r.products_independent && r.plus_singular && r.minus_singular == Some(true));
        }
    }

    /// Outside (−1, 1) the reduction can disagree with direct independence.
    #[test]
    fn reduction_breaks_outside_unit_interval() {
        let r = reduced_independence(4, &frac(-7, 3)).unwrap();
        assert!(r.products_independent && !r.plus_independent && r.plus_singular);
        assert!(!r.consistent());
    }

    fn sample_t(d: usize) -> impl Strategy<Value = ExScalar> {
        (1i64..=12).prop_flat_map(|den| (-den + 1..den, Just(den))).prop_filter_map("excluded t", move |(n, den)| {
            let t = frac(n, den);
            let excluded = [special_t(d), int(1), int(-1), frac(d as i64 - 3, d as i64 - 1), frac(-(d as i64 + 1), d as i64 - 1)];
            (!excluded.contains(&t)).then_some(t)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn reduction_equivalence_d4(t in sample_t(4)) {
            let r = reduced_independence(4, &t).unwrap();
            prop_assert!(r.consistent(), "{:?}", r);
        }

        #[test]
        fn reduction_equivalence_d5(t in sample_t(5)) {
            let r = reduced_independence(5, &t).unwrap();
            prop_assert!(r.consistent(), "{:?}", r);
        }

        #[test]
        fn pair_sum_offdiagonal_root(d in 3usize..12, n in -20i64..20, den in 1i64..9) {
            let t = frac(n, den);
            prop_assert_eq!(pair_sum_offdiagonal(d, &t).is_zero(), t == special_t(d));
        }
    }

    #[test]
    fn multiplicities_exhaust() {
        for d in 3..=MAX_SPECTRUM_DIM {
            for sign in Sign::BOTH {
                let total: usize = spectrum_claims(d, sign).iter().map(|c| c.claimed_multiplicity).sum();
                assert_eq!(total, d * (d - 1) / 2);
            }
        }
    }
}
