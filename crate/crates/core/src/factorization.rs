//! Exact factorizations Φ(ρ) = (I⊗Tr)·U*(ρ ⊗ I/ν)·U, dual channel pairs,
//! complementary channels, and the factorizability conditions for d = 4.
//!
//! Tensor convention: X⊗Y is `X.kron(Y)`, the system is the first factor and
//! the ancilla M_ν the second unless a check says otherwise.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::channels::{apply_channel, build_family, FamilySpec, KrausSet};
use crate::linalg::{hermitian_eig, MatrixRank, TraceOut};
use crate::{Error, ExScalar, Field, Mat, Result, Ring, Scalar, ToC64, FLOAT_TOL};

/// A linear map M_n → M_m stored as its Choi matrix Σ_ij E_ij ⊗ Φ(E_ij).
#[derive(Debug, Clone, PartialEq)]
pub struct MapTable<T: Ring> {
    pub input_dim: usize,
    pub output_dim: usize,
    pub choi: Mat<T>,
}

impl<T: Field> MapTable<T> {
    pub fn from_fn(input_dim: usize, output_dim: usize, mut f: impl FnMut(&Mat<T>) -> Result<Mat<T>>) -> Result<Self> {
        let (n, m) = (input_dim, output_dim);
        let mut choi = Mat::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let img = f(&Mat::unit(n, i, j))?;
                if img.shape() != (m, m) {
                    return Err(Error::Shape(format!("image is {}x{}, expected {m}x{m}", img.rows(), img.cols())));
                }
                for a in 0..m {
                    for b in 0..m {
                        choi.set(i * m + a, j * m + b, img.get(a, b).clone());
                    }
                }
            }
        }
        Ok(MapTable { input_dim, output_dim, choi })
    }

    pub fn from_kraus(k: &KrausSet<T>) -> Result<Self> {
        Self::from_fn(k.d(), k.d(), |rho| apply_channel(k, rho))
    }

    /// Φ(E_ij).
    pub fn image(&self, i: usize, j: usize) -> Mat<T> {
        self.choi.block(i, j, self.output_dim, self.output_dim)
    }

    pub fn apply(&self, rho: &Mat<T>) -> Result<Mat<T>> {
        if rho.shape() != (self.input_dim, self.input_dim) {
            return Err(Error::Shape(format!("input {}x{} for a map on M_{}", rho.rows(), rho.cols(), self.input_dim)));
        }
        let m = self.output_dim;
        let mut out = Mat::zeros(m, m);
        for i in 0..self.input_dim {
            for j in 0..self.input_dim {
                let c = rho.get(i, j);
                if !c.is_zero() {
                    out = &out + &self.image(i, j).scale(c);
                }
            }
        }
        Ok(out)
    }

    /// Φ(I) = I and Tr Φ(E_ij) = δ_ij, compared with the backend's tolerance.
    pub fn is_ucpt_like(&self) -> bool
    where
        T: Scalar,
    {
        let n = self.input_dim;
        let Ok(unit_image) = self.apply(&Mat::identity(n)) else {
            return false;
        };
        let unital = self.output_dim == n && close(&unit_image, &Mat::identity(n));
        let tp = (0..n).all(|i| {
            (0..n).all(|j| {
                let tr = self.image(i, j).trace().unwrap_or_else(|_| T::one());
                tr.approx_eq(&if i == j { T::one() } else { T::zero() })
            })
        });
        unital && tp
    }
}

fn residual<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> f64 {
    a.max_defect(b, Scalar::magnitude)
}

fn close<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> bool {
    a.shape() == b.shape() && a.data().iter().zip(b.data()).all(|(x, y)| x.approx_eq(y))
}

fn unitary_check<T: Scalar>(u: &Mat<T>) -> Result<()> {
    if !u.is_square() {
        return Err(Error::Shape(format!("{}x{} is not square", u.rows(), u.cols())));
    }
    let id = Mat::identity(u.rows());
    let left = &u.adjoint() * u;
    let right = u * &u.adjoint();
    if close(&left, &id) && close(&right, &id) {
        Ok(())
    } else {
        Err(Error::NotUnitary(residual(&left, &id).max(residual(&right, &id))))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationWitness<T: Ring> {
    pub u: Mat<T>,
    pub nu: usize,
    /// Which factor is traced out; the ancilla sits there.
    pub side: TraceOut,
    pub verified_unitary: bool,
    pub verified_channel: bool,
    /// The induced map is unital and trace preserving.
    pub induced_ucpt: bool,
    /// Zero on exact backends when verified.
    pub max_residual: f64,
}

/// The channel induced by U with a maximally mixed ancilla of size ν.
pub fn induced_channel<T: Field>(u: &Mat<T>, d: usize, nu: usize, side: TraceOut) -> Result<MapTable<T>> {
    if u.shape() != (d * nu, d * nu) {
        return Err(Error::Shape(format!("unitary is {}x{}, expected {n}x{n}", u.rows(), u.cols(), n = d * nu)));
    }
    let mixed = Mat::<T>::identity(nu).scale(&T::from_int(nu as i64).inv()?);
    let adj = u.adjoint();
    MapTable::from_fn(d, d, |rho| {
        let (lifted, p, q) = match side {
            TraceOut::Second => (rho.kron(&mixed), d, nu),
            TraceOut::First => (mixed.kron(rho), nu, d),
        };
        (&(&adj * &lifted) * u).partial_trace(p, q, side)
    })
}

/// Checks U*U = I and that U reproduces the channel on every matrix unit.
pub fn verify_exact_factorization<T: Field + Scalar>(
    u: &Mat<T>,
    k: &KrausSet<T>,
    nu: usize,
    side: TraceOut,
) -> Result<FactorizationWitness<T>> {
    unitary_check(u)?;
    let induced = induced_channel(u, k.d(), nu, side)?;
    let target = MapTable::from_kraus(k)?;
    let max_residual = residual(&induced.choi, &target.choi);
    Ok(FactorizationWitness {
        u: u.clone(),
        nu,
        side,
        verified_unitary: true,
        verified_channel: close(&induced.choi, &target.choi),
        induced_ucpt: induced.is_ucpt_like(),
        max_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedUnitary {
    BlockDiag,
    Ucpt2x2,
    D3DualU,
    D3DualW,
    Choi4Square,
}

impl NamedUnitary {
    pub const ALL: [NamedUnitary; 5] =
        [NamedUnitary::BlockDiag, NamedUnitary::Ucpt2x2, NamedUnitary::D3DualU, NamedUnitary::D3DualW, NamedUnitary::Choi4Square];

    pub fn as_str(self) -> &'static str {
        match self {
            NamedUnitary::BlockDiag => "block_diag",
            NamedUnitary::Ucpt2x2 => "ucpt_2x2",
            NamedUnitary::D3DualU => "d3_dual_U",
            NamedUnitary::D3DualW => "d3_dual_W",
            NamedUnitary::Choi4Square => "choi4_square",
        }
    }
}

impl fmt::Display for NamedUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NamedUnitary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedUnitary::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::BadParameters(format!("unknown unitary {s:?}")))
    }
}

/// A named unitary together with the channel it is meant to factorize.
#[derive(Debug, Clone)]
pub struct NamedFactorization {
    pub name: NamedUnitary,
    pub u: Mat<ExScalar>,
    pub nu: usize,
    pub side: TraceOut,
    pub channel: KrausSet<ExScalar>,
}

impl NamedFactorization {
    pub fn verify(&self) -> Result<FactorizationWitness<ExScalar>> {
        verify_exact_factorization(&self.u, &self.channel, self.nu, self.side)
    }
}

/// Σ_m A_m ⊗ E_mm.
pub fn block_diag<T: Ring>(k: &KrausSet<T>) -> Mat<T> {
    let n = k.len();
    k.generators().iter().enumerate().fold(Mat::zeros(k.d() * n, k.d() * n), |acc, (m, a)| &acc + &a.kron(&Mat::unit(n, m, m)))
}

/// [[A1, A2], [A3, A4]] = Σ_jk A_{2j+k} ⊗ E_jk.
pub fn ucpt_2x2<T: Ring>(k: &KrausSet<T>) -> Result<Mat<T>> {
    if k.len() != 4 {
        return Err(Error::BadParameters(format!("2x2 arrangement needs 4 generators, got {}", k.len())));
    }
    let mut u = Mat::zeros(2 * k.d(), 2 * k.d());
    for j in 0..2 {
        for l in 0..2 {
            u = &u + &k.generators()[2 * j + l].kron(&Mat::unit(2, j, l));
        }
    }
    Ok(u)
}

/// (1/N)·Σ_jk A_j*A_k ⊗ (2E_jk − δ_jk I₄), padding with zero generators.
pub fn choi4_square<T: Field>(k: &KrausSet<T>) -> Result<Mat<T>> {
    if k.len() > 4 {
        return Err(Error::BadParameters(format!("needs at most 4 generators, got {}", k.len())));
    }
    let d = k.d();
    let mut gens = k.generators().to_vec();
    gens.resize(4, Mat::zeros(d, d));
    let inv = k.norm_sq().inv()?;
    let mut u = Mat::zeros(4 * d, 4 * d);
    for j in 0..4 {
        for l in 0..4 {
            let mut anc = Mat::unit(4, j, l).scale(&T::from_int(2));
            if j == l {
                anc = &anc - &Mat::identity(4);
            }
            u = &u + &(&gens[j].adjoint() * &gens[l]).kron(&anc);
        }
    }
    Ok(u.scale(&inv))
}

/// Kraus form of Φ∘Φ*: generators A_k*A_j with norm N².
pub fn compose_with_adjoint<T: Field>(k: &KrausSet<T>) -> Result<KrausSet<T>> {
    let gens = k.generators();
    let products = gens.iter().flat_map(|aj| gens.iter().map(move |ak| &ak.adjoint() * aj)).collect();
    KrausSet::new(k.d(), products, k.norm_sq().times(k.norm_sq()))
}

/// The d = 3 key channels at t = −1/2 (A_k) and t = 1 (B_k) with
/// U = (2/3)·Σ A_k⊗B_k and W = (2/3)·Σ B_k⊗A_k.
#[derive(Debug, Clone)]
pub struct D3Dual {
    pub phi: KrausSet<ExScalar>,
    pub psi: KrausSet<ExScalar>,
    pub u: Mat<ExScalar>,
    pub w: Mat<ExScalar>,
}

pub fn d3_dual() -> Result<D3Dual> {
    let phi = build_family(&FamilySpec::key(3, ExScalar::from_frac(-1, 2)))?;
    let psi = build_family(&FamilySpec::key(3, ExScalar::from(1)))?;
    let c = ExScalar::from_frac(2, 3);
    let pair_sum =
        |xs: &[Mat<ExScalar>], ys: &[Mat<ExScalar>]| xs.iter().zip(ys).fold(Mat::zeros(9, 9), |acc, (x, y)| &acc + &x.kron(y)).scale(&c);
    let u = pair_sum(phi.generators(), psi.generators());
    let w = pair_sum(psi.generators(), phi.generators());
    Ok(D3Dual { phi, psi, u, w })
}

#[derive(Debug, Clone)]
pub struct D3DualReport {
    /// Φ from U tracing the second factor.
    pub u_phi: FactorizationWitness<ExScalar>,
    /// Ψ from U tracing the first factor.
    pub u_psi: FactorizationWitness<ExScalar>,
    /// Ψ from W tracing the second factor.
    pub w_psi: FactorizationWitness<ExScalar>,
    /// Φ from W tracing the first factor.
    pub w_phi: FactorizationWitness<ExScalar>,
}

impl D3DualReport {
    pub fn verified(&self) -> bool {
        [&self.u_phi, &self.u_psi, &self.w_psi, &self.w_phi].iter().all(|w| w.verified_channel)
    }
}

pub fn verify_d3_duality() -> Result<D3DualReport> {
    let p = d3_dual()?;
    Ok(D3DualReport {
        u_phi: verify_exact_factorization(&p.u, &p.phi, 3, TraceOut::Second)?,
        u_psi: verify_exact_factorization(&p.u, &p.psi, 3, TraceOut::First)?,
        w_psi: verify_exact_factorization(&p.w, &p.psi, 3, TraceOut::Second)?,
        w_phi: verify_exact_factorization(&p.w, &p.phi, 3, TraceOut::First)?,
    })
}

/// Builds a named unitary. `block_diag`, `ucpt_2x2` and `choi4_square` need a
/// Kraus set; the d = 3 pair ignores it.
pub fn build_named_unitary(name: NamedUnitary, k: Option<&KrausSet<ExScalar>>) -> Result<NamedFactorization> {
    let need = || k.ok_or_else(|| Error::BadParameters(format!("{name} needs a Kraus set")));
    Ok(match name {
        NamedUnitary::BlockDiag => {
            let k = need()?;
            NamedFactorization { name, u: block_diag(k), nu: k.len(), side: TraceOut::Second, channel: k.clone() }
        }
        NamedUnitary::Ucpt2x2 => {
            let k = need()?;
            NamedFactorization { name, u: ucpt_2x2(k)?, nu: 2, side: TraceOut::Second, channel: k.clone() }
        }
        NamedUnitary::Choi4Square => {
            let k = need()?;
            NamedFactorization { name, u: choi4_square(k)?, nu: 4, side: TraceOut::Second, channel: compose_with_adjoint(k)? }
        }
        NamedUnitary::D3DualU => {
            let p = d3_dual()?;
            NamedFactorization { name, u: p.u, nu: 3, side: TraceOut::Second, channel: p.phi }
        }
        NamedUnitary::D3DualW => {
            let p = d3_dual()?;
            NamedFactorization { name, u: p.w, nu: 3, side: TraceOut::Second, channel: p.psi }
        }
    })
}

/// Φ(ρ) = (I⊗Tr)U*(ρ⊗I_q/q)U on M_p and Ψ(γ) = (Tr⊗I)U*(I_p/p⊗γ)U on M_q.
pub fn dual_channels<T: Field + Scalar>(u: &Mat<T>, p: usize, q: usize) -> Result<(MapTable<T>, MapTable<T>)> {
    if u.shape() != (p * q, p * q) {
        return Err(Error::Shape(format!("unitary is {}x{}, expected {n}x{n}", u.rows(), u.cols(), n = p * q)));
    }
    unitary_check(u)?;
    let adj = u.adjoint();
    let phi_mixed = Mat::<T>::identity(q).scale(&T::from_int(q as i64).inv()?);
    let psi_mixed = Mat::<T>::identity(p).scale(&T::from_int(p as i64).inv()?);
    let phi = MapTable::from_fn(p, p, |rho| (&(&adj * &rho.kron(&phi_mixed)) * u).partial_trace(p, q, TraceOut::Second))?;
    let psi = MapTable::from_fn(q, q, |g| (&(&adj * &psi_mixed.kron(g)) * u).partial_trace(p, q, TraceOut::First))?;
    Ok((phi, psi))
}

/// Φ^C(ρ) = (1/N)·Σ_jk Tr(A_j*ρA_k)·E_jk, a map M_d → M_κ.
pub fn complementary_channel<T: Field>(k: &KrausSet<T>) -> Result<MapTable<T>> {
    let inv = k.norm_sq().inv()?;
    let gens = k.generators();
    let kappa = gens.len();
    MapTable::from_fn(k.d(), kappa, |rho| {
        let mut out = Mat::zeros(kappa, kappa);
        for (j, aj) in gens.iter().enumerate() {
            let left = &aj.adjoint() * rho;
            for (l, al) in gens.iter().enumerate() {
                out.set(j, l, (&left * al).trace()?.times(&inv));
            }
        }
        Ok(out)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    /// Largest entry of the defect; zero on exact backends when it holds.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub nu: usize,
    pub conditions: Vec<Condition>,
}

impl ConditionReport {
    pub fn holds(&self, name: &str) -> Option<bool> {
        self.conditions.iter().find(|c| c.name == name).map(|c| c.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }
}

struct Collector {
    conditions: Vec<Condition>,
}

impl Collector {
    fn new() -> Self {
        Collector { conditions: Vec::new() }
    }

    /// Each pair must agree; the condition holds when all do.
    fn equalities<T: Scalar>(&mut self, name: &str, pairs: impl IntoIterator<Item = (Mat<T>, Mat<T>)>) {
        let mut holds = true;
        let mut worst = 0.0f64;
        for (a, b) in pairs {
            holds &= close(&a, &b);
            worst = worst.max(residual(&a, &b));
        }
        self.conditions.push(Condition { name: String::from(name), holds, residual: worst });
    }

    fn flag(&mut self, name: &str, holds: bool, residual: f64) {
        self.conditions.push(Condition { name: String::from(name), holds, residual });
    }

    fn finish(self, nu: usize) -> ConditionReport {
        ConditionReport { nu, conditions: self.conditions }
    }
}

fn normalized_trace<T: Field>(m: &Mat<T>) -> Result<T> {
    m.trace()?.div(&T::from_int(m.rows() as i64))
}

fn scalar_identity<T: Ring>(n: usize, c: T) -> Mat<T> {
    Mat::identity(n).scale(&c)
}

fn distinct_triples() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for j in 0..4 {
        for k in 0..4 {
            for m in 0..4 {
                if j != k && k != m && j != m {
                    out.push([j, k, m]);
                }
            }
        }
    }
    out
}

const DISJOINT_PAIRS: [[usize; 4]; 3] = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum D4Mode {
    /// Y_j = U_j unitary.
    UnitaryAnsatz,
    /// Y_j = M·U_j with M² = (I + (3/14)·Σ_{k≠j} Q⁺_jk)⁻¹.
    GeneralM,
}

impl FromStr for D4Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unitary_ansatz" => Ok(D4Mode::UnitaryAnsatz),
            "general_M" | "general_m" => Ok(D4Mode::GeneralM),
            _ => Err(Error::BadParameters(format!("unknown mode {s:?}"))),
        }
    }
}

/// Conditions on U₁..U₄ ∈ M_ν for a factorization U = Σ A_k ⊗ U_k of the d = 4
/// key channel at t = −1/3.
pub fn d4_condition_check<T: Field + Scalar + ToC64>(us: &[Mat<T>], mode: D4Mode) -> Result<ConditionReport> {
    if us.len() != 4 {
        return Err(Error::BadParameters(format!("needs 4 matrices, got {}", us.len())));
    }
    let nu = us[0].rows();
    if us.iter().any(|u| u.shape() != (nu, nu)) {
        return Err(Error::Shape(String::from("matrices must be square of equal size")));
    }
    let adj: Vec<Mat<T>> = us.iter().map(Mat::adjoint).collect();
    let left = |j: usize, k: usize| &us[j] * &adj[k];
    let right = |j: usize, k: usize| &adj[j] * &us[k];
    let q = |j: usize, k: usize, s: bool| if s { &left(j, k) + &left(k, j) } else { &left(j, k) - &left(k, j) };
    let r = |j: usize, k: usize, s: bool| if s { &right(j, k) + &right(k, j) } else { &right(j, k) - &right(k, j) };
    let zero = Mat::<T>::zeros(nu, nu);
    let mut c = Collector::new();

    c.equalities("unitary", us.iter().map(|u| (&adj_of(u) * u, Mat::identity(nu))));
    let mut orth = Vec::new();
    for j in 0..4 {
        for k in 0..4 {
            let expected = if j == k { T::one() } else { T::zero() };
            orth.push((scalar_identity(1, normalized_trace(&left(j, k))?), scalar_identity(1, expected)));
        }
    }
    c.equalities("trace_orthonormal", orth);
    c.equalities("q_plus_pairs", DISJOINT_PAIRS.iter().map(|p| (q(p[0], p[1], true), q(p[2], p[3], true))));
    c.equalities("r_plus_pairs", DISJOINT_PAIRS.iter().map(|p| (r(p[0], p[1], true), r(p[2], p[3], true))));
    let triples = distinct_triples();
    let cycle = |f: &dyn Fn(usize, usize) -> Mat<T>| -> Vec<(Mat<T>, Mat<T>)> {
        triples.iter().map(|t| (&(&f(t[0], t[1]) + &f(t[1], t[2])) + &f(t[2], t[0]), zero.clone())).collect()
    };
    c.equalities("q_plus_cycles", cycle(&|j, k| q(j, k, true)));
    c.equalities("r_plus_cycles", cycle(&|j, k| r(j, k, true)));
    c.equalities("q_minus_cycles", cycle(&|j, k| q(j, k, false)));
    c.equalities("r_minus_cycles", cycle(&|j, k| r(j, k, false)));
    c.equalities("asymmetric_cycles", cycle(&left));
    c.equalities("asymmetric_cycles_starred", cycle(&right));

    // Eigenvalues of U₃*U₂ must be 1, ω, ω² in equal multiplicity.
    let m = right(2, 1);
    let m2 = &m * &m;
    let m3 = &m2 * &m;
    let spectrum = [(m3, Mat::identity(nu)), (scalar_identity(1, m.trace()?), zero_1()), (scalar_identity(1, m2.trace()?), zero_1())];
    c.equalities("cube_root_spectrum", spectrum);

    if mode == D4Mode::GeneralM {
        let p_of = |j: usize| {
            let s = (0..4).filter(|&k| k != j).fold(Mat::zeros(nu, nu), |acc, k| &acc + &q(j, k, true));
            &Mat::identity(nu) + &s.scale(&T::from_int(3).div(&T::from_int(14)).expect("nonzero"))
        };
        let p0 = p_of(0);
        c.equalities("m_independent_of_j", (1..4).map(|j| (p_of(j), p0.clone())));
        let min_eig = hermitian_eig(&p0.map(ToC64::approx_c64)).map(|e| e.values.iter().copied().fold(f64::INFINITY, f64::min));
        match min_eig {
            Ok(v) => c.flag("m_positive_definite", v > FLOAT_TOL, if v > FLOAT_TOL { 0.0 } else { -v }),
            Err(_) => c.flag("m_positive_definite", false, f64::INFINITY),
        }
        match p0.inverse() {
            Ok(inv) => {
                let mut pairs = Vec::new();
                for j in 0..4 {
                    for k in 0..4 {
                        let expected = if j == k { T::one() } else { T::zero() };
                        pairs.push((scalar_identity(1, normalized_trace(&(&inv * &left(j, k)))?), scalar_identity(1, expected)));
                    }
                }
                c.equalities("m_inverse_trace_orthogonal", pairs);
            }
            Err(_) => c.flag("m_inverse_trace_orthogonal", false, f64::INFINITY),
        }
    }
    Ok(c.finish(nu))
}

fn adj_of<T: Ring>(u: &Mat<T>) -> Mat<T> {
    u.adjoint()
}

fn zero_1<T: Ring>() -> Mat<T> {
    Mat::zeros(1, 1)
}

/// Hermitian unitaries 2E_j − I with E_j a rank-two spectral projection taken
/// from four different non-standard mutually unbiased bases of C⁴: the
/// anticommuting Pauli products X⊗I, Y⊗I, Z⊗X, Z⊗Y.
pub fn mub_default() -> Vec<Mat<ExScalar>> {
    let i = ExScalar::i();
    let z = ExScalar::zero;
    let one = ExScalar::one;
    let x = Mat::from_rows(vec![vec![z(), one()], vec![one(), z()]]).expect("2x2");
    let y = Mat::from_rows(vec![vec![z(), i.negated()], vec![i.clone(), z()]]).expect("2x2");
    let zz = Mat::diag(vec![one(), one().negated()]);
    let id = Mat::identity(2);
    vec![x.kron(&id), y.kron(&id), zz.kron(&x), zz.kron(&y)]
}

fn independent_count<T: Field + MatrixRank>(ms: &[Mat<T>]) -> usize {
    let (r, c) = ms[0].shape();
    T::matrix_rank(&Mat::from_fn(ms.len(), r * c, |i, j| ms[i].get(j / c, j % c).clone()))
}

/// Conditions for U = Σ A_k ⊗ Y_k to factorize Φ(ρ) = Σ A_k*ρA_k: τ(Y_jY_k*) = δ_jk
/// and Σ_jk ⟨e_s, A_jA_k* e_t⟩·Y_jY_k* = δ_st·I, with the starred twin.
pub fn factorization_ansatz_check<T: Field + Scalar + MatrixRank>(a_list: &[Mat<T>], y_list: &[Mat<T>]) -> Result<ConditionReport> {
    if a_list.is_empty() || a_list.len() != y_list.len() {
        return Err(Error::BadParameters(format!("{} generators for {} ancilla matrices", a_list.len(), y_list.len())));
    }
    if independent_count(a_list) != a_list.len() {
        return Err(Error::PreconditionFailed(String::from("generators are linearly dependent")));
    }
    let d = a_list[0].rows();
    let nu = y_list[0].rows();
    let n = a_list.len();
    let mut c = Collector::new();
    let mut orth = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let expected = if j == k { T::one() } else { T::zero() };
            orth.push((scalar_identity(1, normalized_trace(&(&y_list[j] * &y_list[k].adjoint()))?), scalar_identity(1, expected)));
        }
    }
    c.equalities("trace_orthonormal", orth);
    for (name, starred) in [("aa_star_sums", false), ("a_star_a_sums", true)] {
        let mut pairs = Vec::new();
        for s in 0..d {
            for t in 0..d {
                let mut total = Mat::zeros(nu, nu);
                for j in 0..n {
                    for k in 0..n {
                        let (ap, yp) = if starred {
                            (&a_list[j].adjoint() * &a_list[k], &y_list[j].adjoint() * &y_list[k])
                        } else {
                            (&a_list[j] * &a_list[k].adjoint(), &y_list[j] * &y_list[k].adjoint())
                        };
                        let coeff = ap.get(s, t);
                        if !coeff.is_zero() {
                            total = &total + &yp.scale(coeff);
                        }
                    }
                }
                let expected = if s == t { Mat::identity(nu) } else { Mat::zeros(nu, nu) };
                pairs.push((total, expected));
            }
        }
        c.equalities(name, pairs);
    }
    Ok(c.finish(nu))
}

/// Generators scaled so that Φ(ρ) = Σ Ã_k*ρÃ_k, when √N lies in the field.
pub fn normalized_generators(k: &KrausSet<ExScalar>) -> Result<Vec<Mat<ExScalar>>> {
    let n = k.norm_sq().as_rational().ok_or_else(|| Error::BadParameters(String::from("non-rational norm")))?;
    let root = ExScalar::sqrt_of_rational(&n).ok_or_else(|| Error::BadParameters(format!("sqrt({n}) is outside the field")))?;
    let inv = root.inv()?;
    Ok(k.generators().iter().map(|a| a.scale(&inv)).collect())
}

/// The matrix-element tables behind non-factorizability of the Arveson–Ohno
/// channel, on the normalized generators Ã = A/2.
pub fn arveson_ohno_premises() -> Result<ConditionReport> {
    let k = build_family(&FamilySpec::arveson_ohno())?;
    let a = normalized_generators(&k)?;
    let ad: Vec<Mat<ExScalar>> = a.iter().map(Mat::adjoint).collect();
    let q = ExScalar::from_frac;
    let mut c = Collector::new();
    let as_mat = |x: ExScalar| scalar_identity(1, x);

    let mut e32 = Vec::new();
    for j in 0..4 {
        for l in 0..4 {
            if (j, l) != (3, 1) {
                e32.push((as_mat((&ad[j] * &a[l]).get(2, 1).clone()), zero_1()));
            }
        }
    }
    c.equalities("e3_astar_a_e2_vanishes_except_4_2", e32);
    let exceptional = (&ad[3] * &a[1]).get(2, 1).clone();
    c.flag("e3_astar_a_e2_at_4_2_nonzero", !exceptional.is_zero(), 0.0);

    let mut off = Vec::new();
    for m in 0..3 {
        for j in 0..4 {
            for l in (0..4).filter(|&l| l != j) {
                off.push((as_mat((&ad[j] * &a[l]).get(m, m).clone()), zero_1()));
                off.push((as_mat((&a[j] * &ad[l]).get(m, m).clone()), zero_1()));
            }
        }
    }
    c.equalities("diagonal_cross_terms_vanish", off);

    let table = |name: &str, f: &dyn Fn(usize) -> ExScalar, expected: [ExScalar; 4], c: &mut Collector| {
        c.equalities(name, (0..4).map(|j| (as_mat(f(j)), as_mat(expected[j].clone()))));
    };
    table("e2_a_astar_e2", &|j| (&a[j] * &ad[j]).get(1, 1).clone(), [q(0, 1), q(1, 2), q(1, 2), q(0, 1)], &mut c);
    table("e3_a_astar_e3", &|j| (&a[j] * &ad[j]).get(2, 2).clone(), [q(0, 1), q(0, 1), q(3, 4), q(1, 4)], &mut c);
    table("e3_astar_a_e3", &|j| (&ad[j] * &a[j]).get(2, 2).clone(), [q(0, 1), q(1, 2), q(0, 1), q(1, 2)], &mut c);
    Ok(c.finish(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{choi, FamilyName};
    use crate::linalg::rank_nullspace;
    use crate::C64;

    fn q(n: i64, d: i64) -> ExScalar {
        ExScalar::from_frac(n, d)
    }

    fn int(n: i64) -> ExScalar {
        ExScalar::from(n)
    }

    fn family(spec: FamilySpec) -> KrausSet<ExScalar> {
        build_family(&spec).unwrap()
    }

    fn alpha_beta() -> KrausSet<ExScalar> {
        family(FamilySpec::alpha_beta(q(3, 5), q(4, 5)))
    }

    #[test]
    fn block_diagonal_at_endpoints() {
        for d in [3, 4] {
            for t in [int(1), int(-1)] {
                let f = build_named_unitary(NamedUnitary::BlockDiag, Some(&family(FamilySpec::key(d, t)))).unwrap();
                let w = f.verify().unwrap();
                assert!(w.verified_channel && w.induced_ucpt && w.max_residual == 0.0);
            }
        }
    }

    #[test]
    fn two_by_two_arrangement() {
        let k = alpha_beta();
        let f = build_named_unitary(NamedUnitary::Ucpt2x2, Some(&k)).unwrap();
        assert_eq!(f.u.block(0, 0, 3, 3).rows(), 3);
        let w = f.verify().unwrap();
        assert!(w.verified_channel && w.nu == 2);
        let complex = family(FamilySpec::alpha_beta(q(4, 5), ExScalar::from_gaussian(crate::field::rat(0, 1), crate::field::rat(3, 5))));
        assert!(verify_exact_factorization(&ucpt_2x2(&complex).unwrap(), &complex, 2, TraceOut::Second).unwrap().verified_channel);
    }

    #[test]
    fn non_unitary_rejected() {
        let k = family(FamilySpec::key(3, q(1, 2)));
        let u = block_diag(&k);
        assert!(matches!(verify_exact_factorization(&u, &k, 3, TraceOut::Second), Err(Error::NotUnitary(_))));
        assert!(ucpt_2x2(&k).is_err());
    }

    #[test]
    fn d3_duality() {
        let r = verify_d3_duality().unwrap();
        assert!(r.verified(), "{r:?}");
        let p = d3_dual().unwrap();
        let blocks = |m: &Mat<ExScalar>| p.phi.generators().iter().position(|a| a.scale(&q(2, 3)) == *m);
        // The displayed arrangement: block (i, j) of Σ B_k ⊗ A_k-ordering.
        let arranged = p.psi.generators().iter().zip(p.phi.generators()).fold(Mat::zeros(9, 9), |acc, (b, a)| &acc + &b.kron(a));
        let order: Vec<Option<usize>> =
            (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| blocks(&arranged.scale(&q(2, 3)).block(i, j, 3, 3))).collect();
        assert_eq!(order, vec![Some(0), Some(2), Some(1), Some(2), Some(1), Some(0), Some(1), Some(0), Some(2)]);
    }

    #[test]
    fn d3_named() {
        for name in [NamedUnitary::D3DualU, NamedUnitary::D3DualW] {
            assert!(build_named_unitary(name, None).unwrap().verify().unwrap().verified_channel);
        }
        assert!(build_named_unitary(NamedUnitary::BlockDiag, None).is_err());
    }

    #[test]
    fn choi4_square_key_and_arveson() {
        for t in [int(0), q(1, 2)] {
            let k = family(FamilySpec::key(4, t));
            let f = build_named_unitary(NamedUnitary::Choi4Square, Some(&k)).unwrap();
            assert!(f.verify().unwrap().verified_channel);
        }
        let ao = family(FamilySpec::arveson_ohno());
        let f = build_named_unitary(NamedUnitary::Choi4Square, Some(&ao)).unwrap();
        assert!(f.verify().unwrap().verified_channel);
        let k5 = family(FamilySpec::key(5, int(0)));
        assert!(matches!(choi4_square(&k5), Err(Error::BadParameters(_))));
    }

    #[test]
    fn choi4_square_pads() {
        let k = family(FamilySpec::ohno_lowrank(3));
        assert!(k.len() <= 4);
        assert!(
            verify_exact_factorization(&choi4_square(&k).unwrap(), &compose_with_adjoint(&k).unwrap(), 4, TraceOut::Second)
                .unwrap()
                .verified_channel
        );
    }

    /// U*U = I term by term: the four sums in the expansion collapse to
    /// 4X − 2X − 2X + I with X = Σ A_j*A_m ⊗ E_jm.
    #[test]
    fn choi4_square_cancellations() {
        for k in [family(FamilySpec::key(4, q(1, 3))), family(FamilySpec::arveson_ohno())] {
            let d = k.d();
            let inv = k.norm_sq().inv().unwrap();
            let a: Vec<Mat<ExScalar>> = k.generators().to_vec();
            let mut x = Mat::zeros(4 * d, 4 * d);
            for j in 0..4 {
                for m in 0..4 {
                    x = &x + &(&a[j].adjoint() * &a[m]).kron(&Mat::unit(4, j, m));
                }
            }
            let x = x.scale(&inv);
            let expansion = &(&(&x.scale(&int(4)) - &x.scale(&int(2))) - &x.scale(&int(2))) + &Mat::identity(4 * d);
            assert_eq!(expansion, Mat::identity(4 * d));
            let u = choi4_square(&k).unwrap();
            assert_eq!(&u * &u.adjoint(), Mat::identity(4 * d));
        }
    }

    #[test]
    fn orthogonal_unitaries_give_diagonal_dual() {
        let z = ExScalar::zero;
        let o = ExScalar::one;
        let i = ExScalar::i();
        let paulis = vec![
            Mat::identity(2),
            Mat::from_rows(vec![vec![z(), o()], vec![o(), z()]]).unwrap(),
            Mat::from_rows(vec![vec![z(), i.negated()], vec![i.clone(), z()]]).unwrap(),
            Mat::diag(vec![o(), o().negated()]),
        ];
        let k = KrausSet::new(2, paulis, int(4)).unwrap();
        let (phi, psi) = dual_channels(&block_diag(&k), 2, 4).unwrap();
        assert_eq!(phi, MapTable::from_kraus(&k).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { Mat::unit(4, i, i) } else { Mat::zeros(4, 4) };
                assert_eq!(psi.image(i, j), expected);
            }
        }
    }

    #[test]
    fn alpha_beta_dual() {
        let (a2, b2) = (q(9, 25), q(16, 25));
        let u = ucpt_2x2(&alpha_beta()).unwrap();
        let (phi, psi) = dual_channels(&u, 3, 2).unwrap();
        assert_eq!(phi, MapTable::from_kraus(&alpha_beta()).unwrap());
        let g = Mat::from_rows(vec![vec![q(1, 3), q(1, 7)], vec![q(1, 7), q(2, 3)]]).unwrap();
        let third = q(1, 3);
        let tr = g.trace().unwrap();
        let (g11, g22) = (g.get(0, 0).clone(), g.get(1, 1).clone());
        let expected = &Mat::identity(2).scale(&tr.times(&third))
            + &Mat::diag(vec![a2.times(&g11).plus(&b2.times(&g22)), b2.times(&g11).plus(&a2.times(&g22))]).scale(&third);
        assert_eq!(psi.apply(&g).unwrap(), expected);
    }

    #[test]
    fn self_dual_pauli() {
        let z = ExScalar::zero;
        let o = ExScalar::one;
        let sx = Mat::from_rows(vec![vec![z(), o()], vec![o(), z()]]).unwrap();
        let sz = Mat::diag(vec![o(), o().negated()]);
        let u = (&sx.kron(&sz) + &sz.kron(&sx).scale(&ExScalar::i())).scale(&ExScalar::sqrt2().inv().unwrap());
        let (phi, psi) = dual_channels(&u, 2, 2).unwrap();
        let target = MapTable::from_kraus(&KrausSet::new(2, vec![sx, sz], int(2)).unwrap()).unwrap();
        assert_eq!(phi, target);
        assert_eq!(psi, target);
    }

    #[test]
    fn block_diag_dual_matches_kraus() {
        let k = family(FamilySpec::key(4, int(-1)));
        let (phi, _) = dual_channels(&block_diag(&k), 4, 4).unwrap();
        assert_eq!(phi, MapTable::from_kraus(&k).unwrap());
    }

    #[test]
    fn complementary() {
        let u = KrausSet::new(3, vec![Mat::identity(3)], int(1)).unwrap();
        let c = complementary_channel(&u).unwrap();
        let rho =
            Mat::from_rows(vec![vec![q(1, 2), q(1, 5), int(0)], vec![q(1, 5), q(1, 4), int(0)], vec![int(0), int(0), q(1, 4)]]).unwrap();
        assert_eq!(c.apply(&rho).unwrap(), scalar_identity(1, int(1)));
        let ab = complementary_channel(&alpha_beta()).unwrap();
        assert_eq!(ab.apply(&rho).unwrap().trace().unwrap(), int(1));
        let key = complementary_channel(&family(FamilySpec::key(3, q(1, 2)))).unwrap();
        assert_eq!(rank_nullspace(&key.choi).rank, 3);
    }

    fn omega3() -> Mat<ExScalar> {
        Mat::diag(vec![int(1), ExScalar::omega(), ExScalar::omega().times(&ExScalar::omega())])
    }

    #[test]
    fn identity_tuple_fails() {
        let r = d4_condition_check(&vec![Mat::<ExScalar>::identity(3); 4], D4Mode::UnitaryAnsatz).unwrap();
        assert_eq!(r.holds("q_plus_cycles"), Some(false));
        assert_eq!(r.holds("trace_orthonormal"), Some(false));
    }

    #[test]
    fn mub_default_conditions() {
        let r = d4_condition_check(&mub_default(), D4Mode::UnitaryAnsatz).unwrap();
        for name in ["unitary", "trace_orthonormal", "q_plus_pairs", "r_plus_pairs", "q_plus_cycles", "r_plus_cycles"] {
            assert_eq!(r.holds(name), Some(true), "{name}");
        }
        assert_eq!(r.holds("q_minus_cycles"), Some(false));
        assert_eq!(r.holds("r_minus_cycles"), Some(false));
        assert_eq!(r.holds("cube_root_spectrum"), Some(false));
        for u in mub_default() {
            assert_eq!(u, u.adjoint());
            let e = (&u + &Mat::identity(4)).scale(&q(1, 2));
            assert_eq!(&e * &e, e);
            assert_eq!(e.trace().unwrap(), int(2));
        }
    }

    #[test]
    fn cube_root_witness() {
        let us = vec![Mat::identity(3), Mat::identity(3), omega3(), Mat::identity(3)];
        let r = d4_condition_check(&us, D4Mode::UnitaryAnsatz).unwrap();
        assert_eq!(r.holds("cube_root_spectrum"), Some(true));
        let f: Vec<Mat<C64>> = us.iter().map(|u| u.map(ToC64::approx_c64)).collect();
        assert_eq!(d4_condition_check(&f, D4Mode::UnitaryAnsatz).unwrap().holds("cube_root_spectrum"), Some(true));
    }

    #[test]
    fn nu4_never_passes_spectrum() {
        let mubs = mub_default();
        for a in 0..4 {
            for b in 0..4 {
                let mut us = vec![Mat::identity(4); 4];
                us[1] = mubs[a].clone();
                us[2] = mubs[b].clone();
                let r = d4_condition_check(&us, D4Mode::UnitaryAnsatz).unwrap();
                assert_eq!(r.holds("cube_root_spectrum"), Some(false));
            }
        }
    }

    #[test]
    fn general_m_mode() {
        let r = d4_condition_check(&mub_default(), D4Mode::GeneralM).unwrap();
        assert_eq!(r.holds("m_positive_definite"), Some(true));
        assert_eq!(r.holds("m_inverse_trace_orthogonal"), Some(true));
        assert_eq!(r.holds("m_independent_of_j"), Some(true));
    }

    #[test]
    fn ansatz_single_unitary() {
        let u = crate::channels::shift::<ExScalar>(3).unwrap();
        let r = factorization_ansatz_check(&[u], &[Mat::identity(1)]).unwrap();
        assert!(r.all_hold());
    }

    #[test]
    fn ansatz_alpha_beta() {
        let k = alpha_beta();
        let a = normalized_generators(&k).unwrap();
        let r2 = ExScalar::sqrt2();
        let ys: Vec<Mat<ExScalar>> = (0..4).map(|m| Mat::unit(2, m / 2, m % 2).scale(&r2)).collect();
        let r = factorization_ansatz_check(&a, &ys).unwrap();
        assert!(r.all_hold(), "{r:?}");
    }

    #[test]
    fn ansatz_arveson_fails() {
        let a = normalized_generators(&family(FamilySpec::arveson_ohno())).unwrap();
        let w = ExScalar::omega();
        let clock = Mat::diag(vec![int(1), w.clone(), w.times(&w)]);
        let shift = crate::channels::shift::<ExScalar>(3).unwrap();
        let candidates = [
            vec![Mat::identity(3), clock.clone(), shift.clone(), &clock * &shift],
            vec![Mat::identity(3), shift.clone(), &shift * &shift, clock.clone()],
            vec![clock.clone(), &clock * &clock, shift.clone(), &shift * &clock],
        ];
        for ys in candidates {
            let r = factorization_ansatz_check(&a, &ys).unwrap();
            assert_eq!(r.holds("trace_orthonormal"), Some(true));
            assert!(!r.all_hold());
        }
        let dependent = vec![a[0].clone(), a[0].clone()];
        assert!(matches!(factorization_ansatz_check(&dependent, &[Mat::identity(1), Mat::identity(1)]), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn arveson_premises_hold() {
        let r = arveson_ohno_premises().unwrap();
        assert!(r.all_hold(), "{r:?}");
        let k = family(FamilySpec::arveson_ohno());
        assert_eq!(choi(&k).unwrap().rank, 4);
        assert!(crate::channels::check_ucpt(&k).is_ucpt());
        assert_eq!(*k.norm_sq(), int(4));
        assert_eq!(FamilyName::ArvesonOhno.as_str(), "arveson_ohno");
    }

    #[test]
    fn named_parse() {
        for n in NamedUnitary::ALL {
            assert_eq!(n.as_str().parse::<NamedUnitary>().unwrap(), n);
        }
        assert!("nope".parse::<NamedUnitary>().is_err());
    }
}
