//! Randomized evidence for genericity of independence in the partial-isometry
//! families, and for the rank-one-projection construction V = 2|x⟩⟨x| − I.
//!
//! Every trial draws from its own ChaCha8 stream: the generator is seeded with
//! the experiment seed and `set_stream(trial)` selects the trial's stream, so
//! trials can run in any order or concurrently and still reproduce.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{partial_isometry_family, KrausSet};
use crate::extremality::{float_independence, independence, product_set, SetKind};
use crate::field::rat;
use crate::{Error, ExScalar, Mat, Rational, Result, Ring, C64};

/// Haar-distributed unitary: modified Gram–Schmidt on a complex Ginibre matrix.
/// The implied R has a positive diagonal, which fixes the phases.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Mat<C64>> {
    if n == 0 {
        return Err(Error::BadDimension(n));
    }
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();
    for j in 0..n {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let proj: C64 = done[k].iter().zip(&rest[0]).map(|(q, v)| q.conj() * v).sum();
            for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                *v -= proj * q;
            }
        }
        let norm = libm::sqrt(cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>());
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    Ok(Mat::from_fn(n, n, |i, j| cols[j][i]))
}

/// Rational unitary near `u` via the Cayley transform: K = (I−U)(I+U)⁻¹ is
/// skew-Hermitian, its entries are rounded to multiples of 1/denominator, and
/// (I−K)(I+K)⁻¹ is unitary exactly.
pub fn rationalize_unitary(u: &Mat<C64>, denominator: i64) -> Result<Mat<ExScalar>> {
    let n = u.rows();
    let id = Mat::<C64>::identity(n);
    let k = &(&id - u) * &(&id + u).inverse()?;
    let round = |x: f64| Rational::new(BigInt::from(libm::round(x * denominator as f64) as i64), BigInt::from(denominator));
    let exact = Mat::from_fn(n, n, |i, j| {
        if i == j {
            ExScalar::from_gaussian(rat(0, 1), round(k.get(i, i).im))
        } else if i < j {
            ExScalar::from_gaussian(round(k.get(i, j).re), round(k.get(i, j).im))
        } else {
            ExScalar::from_gaussian(round(-k.get(j, i).re), round(k.get(j, i).im))
        }
    });
    let eid = Mat::<ExScalar>::identity(n);
    Ok(&(&eid - &exact) * &(&eid + &exact).inverse()?)
}

/// V = 2zzᵀ/‖z‖² − I, rational and unitary.
pub fn rank_one_reflection(z: &[i64]) -> Result<Mat<ExScalar>> {
    let n: i64 = z.iter().map(|x| x * x).sum();
    if n == 0 {
        return Err(Error::PreconditionFailed(String::from("zero vector")));
    }
    Ok(Mat::from_fn(z.len(), z.len(), |i, j| {
        let delta = if i == j { 1 } else { 0 };
        ExScalar::from_frac(2 * z[i] * z[j] - delta * n, n)
    }))
}

/// The family with every V_m = 2|x⟩⟨x| − I, x = z/‖z‖, skipping the checks on z.
pub fn rational_unit_projection_family_unchecked(d: usize, z: &[i64], t: &ExScalar) -> Result<KrausSet<ExScalar>> {
    if d < 3 || z.len() != d - 1 {
        return Err(Error::BadParameters(format!("need {} entries for d = {d}, got {}", d.saturating_sub(1), z.len())));
    }
    partial_isometry_family(t, &vec![rank_one_reflection(z)?; d])
}

/// As the unchecked variant, but rejects a zero entry and the balanced case
/// where every z_j²(d−1) equals ‖z‖², which reproduces the key family.
pub fn rational_unit_projection_family(d: usize, z: &[i64], t: &ExScalar) -> Result<KrausSet<ExScalar>> {
    if z.contains(&0) {
        return Err(Error::PreconditionFailed(String::from("z has a zero entry")));
    }
    let n: i64 = z.iter().map(|x| x * x).sum();
    if z.iter().all(|x| x * x * (z.len() as i64) == n) {
        return Err(Error::PreconditionFailed(String::from("all |x_j| equal 1/sqrt(d-1)")));
    }
    rational_unit_projection_family_unchecked(d, z, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleMode {
    /// One Haar unitary repeated as every V_m.
    HaarFloat,
    /// Independent Haar unitaries V_1..V_d.
    HaarPerM,
    /// V_m = W_{m mod κ} for independent Haar W_1..W_κ.
    Partition,
    /// V = 2zzᵀ/‖z‖² − I for a random integer z, checked exactly.
    RationalProjection,
    /// Independent diagonal unitaries with twelfth-root-of-unity entries.
    Diagonal,
}

impl SampleMode {
    pub const ALL: [SampleMode; 5] =
        [SampleMode::HaarFloat, SampleMode::HaarPerM, SampleMode::Partition, SampleMode::RationalProjection, SampleMode::Diagonal];

    pub fn as_str(self) -> &'static str {
        match self {
            SampleMode::HaarFloat => "haar_float",
            SampleMode::HaarPerM => "haar_per_m",
            SampleMode::Partition => "partition",
            SampleMode::RationalProjection => "rational_projection",
            SampleMode::Diagonal => "diagonal",
        }
    }
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SampleMode::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| Error::BadParameters(format!("unknown sampling mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub d: usize,
    /// Rational corner entry.
    pub t: ExScalar,
    pub trials: usize,
    pub seed: u64,
    pub mode: SampleMode,
    /// Relative eigenvalue cutoff for the float Gram rank.
    pub tolerance: f64,
    /// Number of blocks κ in partition mode.
    pub blocks: usize,
    /// Haar trials re-checked exactly after rationalization.
    pub spot_checks: usize,
}

impl ExperimentConfig {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    pub fn new(d: usize, t: ExScalar, mode: SampleMode, trials: usize, seed: u64) -> Self {
        ExperimentConfig { d, t, trials, seed, mode, tolerance: Self::DEFAULT_TOLERANCE, blocks: 2, spot_checks: 5 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 3 {
            return Err(Error::BadDimension(self.d));
        }
        if self.trials == 0 {
            return Err(Error::BadParameters(String::from("trials must be at least 1")));
        }
        if self.t.as_rational().is_none() {
            return Err(Error::BadParameters(format!("t = {} is not rational", self.t)));
        }
        if self.mode == SampleMode::Partition && !(1..=self.d).contains(&self.blocks) {
            return Err(Error::BadParameters(format!("{} blocks for d = {}", self.blocks, self.d)));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::BadParameters(format!("tolerance {}", self.tolerance)));
        }
        Ok(())
    }

    pub fn rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub independent: bool,
    /// Rank of the Gram matrix of {A_m*A_n}; exact in exact modes.
    pub rank: usize,
    /// Exact verdict, when the trial was re-checked or sampled exactly.
    pub exact: Option<bool>,
    /// The float and exact verdicts disagree.
    pub incident: bool,
    pub sample: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub expected_rank: usize,
    pub independent_fraction: f64,
    pub failures: Vec<TrialOutcome>,
    pub incidents: Vec<TrialOutcome>,
    pub exact_checks: usize,
}

/// Small integer vectors concentrate on exceptional subvarieties (z₁ = −z₃ at
/// d = 4, for one), so entries are drawn from a wide range.
const PROJECTION_RANGE: i64 = 1_000_000;
const CAYLEY_DENOMINATOR: i64 = 64;

fn exact_verdict(k: &KrausSet<ExScalar>) -> Result<(bool, usize)> {
    let v = independence(&product_set(k, SetKind::AstarA))?;
    Ok((v.independent, v.rank))
}

fn float_verdict(t: f64, vs: &[Mat<C64>], tol: f64) -> Result<(bool, usize)> {
    let k = partial_isometry_family(&C64::new(t, 0.0), vs)?;
    let (rank, n) = float_independence(&product_set(&k, SetKind::AstarA), tol)?;
    Ok((rank == n, rank))
}

fn twelfth_root(k: u32) -> ExScalar {
    // e^{iπk/6} = (cos, sin) with entries in {0, ±1/2, ±√3/2, ±1}.
    let half = ExScalar::from_frac(1, 2);
    let r3 = ExScalar::sqrt3().times(&half);
    let table =
        [(ExScalar::one(), ExScalar::zero()), (r3.clone(), half.clone()), (half.clone(), r3.clone()), (ExScalar::zero(), ExScalar::one())];
    let (c, s) = table[(k % 3) as usize].clone();
    let (c, s) = match k / 3 % 4 {
        0 => (c, s),
        1 => (s.negated(), c),
        2 => (c.negated(), s.negated()),
        _ => (s, c.negated()),
    };
    c.plus(&ExScalar::i().times(&s))
}

/// One trial, drawn from its own stream.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialOutcome> {
    let mut rng = cfg.rng(trial);
    let d = cfg.d;
    let n = d - 1;
    let t_f = cfg.t.to_c64().re;
    let outcome = |independent, rank, exact, sample| TrialOutcome { trial, independent, rank, exact, incident: false, sample };
    match cfg.mode {
        SampleMode::RationalProjection => {
            let z = loop {
                let z: Vec<i64> =
                    (0..n).map(|_| rng.random_range(1..=PROJECTION_RANGE) * if rng.random::<bool>() { 1 } else { -1 }).collect();
                if rational_unit_projection_family(d, &z, &cfg.t).is_ok() {
                    break z;
                }
            };
            let (independent, rank) = exact_verdict(&rational_unit_projection_family(d, &z, &cfg.t)?)?;
            Ok(outcome(independent, rank, Some(independent), format!("z = {z:?}")))
        }
        SampleMode::Diagonal => {
            let vs: Vec<Mat<ExScalar>> =
                (0..d).map(|_| Mat::diag((0..n).map(|_| twelfth_root(rng.random_range(0..12))).collect())).collect();
            let floats: Vec<Mat<C64>> = vs.iter().map(|v| v.map(ExScalar::to_c64)).collect();
            let (independent, rank) = float_verdict(t_f, &floats, cfg.tolerance)?;
            let mut out = outcome(independent, rank, None, String::from("diagonal twelfth roots"));
            if !independent {
                let (exact, _) = exact_verdict(&partial_isometry_family(&cfg.t, &vs)?)?;
                out.exact = Some(exact);
                out.incident = exact != independent;
            }
            Ok(out)
        }
        SampleMode::HaarFloat | SampleMode::HaarPerM | SampleMode::Partition => {
            let draws = match cfg.mode {
                SampleMode::HaarFloat => 1,
                SampleMode::Partition => cfg.blocks,
                _ => d,
            };
            let ws = (0..draws).map(|_| haar_unitary(n, &mut rng)).collect::<Result<Vec<_>>>()?;
            let vs: Vec<Mat<C64>> = (0..d).map(|m| ws[m % draws].clone()).collect();
            let (independent, rank) = float_verdict(t_f, &vs, cfg.tolerance)?;
            let mut out = outcome(independent, rank, None, format!("{draws} Haar draws"));
            if !independent || trial < cfg.spot_checks {
                let exact_ws = ws.iter().map(|w| rationalize_unitary(w, CAYLEY_DENOMINATOR)).collect::<Result<Vec<_>>>()?;
                let exact_vs: Vec<Mat<ExScalar>> = (0..d).map(|m| exact_ws[m % draws].clone()).collect();
                let (exact, _) = exact_verdict(&partial_isometry_family(&cfg.t, &exact_vs)?)?;
                out.exact = Some(exact);
                out.incident = exact != independent;
            }
            Ok(out)
        }
    }
}

/// Merges outcomes in trial order.
pub fn summarize(cfg: &ExperimentConfig, mut outcomes: Vec<TrialOutcome>) -> ExperimentReport {
    outcomes.sort_by_key(|o| o.trial);
    let independent = outcomes.iter().filter(|o| o.independent).count();
    let exact_checks = outcomes.iter().filter(|o| o.exact.is_some()).count();
    let incidents = outcomes.iter().filter(|o| o.incident).cloned().collect();
    let failures = outcomes.into_iter().filter(|o| !o.independent).collect();
    ExperimentReport {
        config: cfg.clone(),
        expected_rank: cfg.d * cfg.d,
        independent_fraction: independent as f64 / cfg.trials as f64,
        failures,
        incidents,
        exact_checks,
    }
}

/// Runs every trial sequentially.
pub fn genericity_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let outcomes = (0..cfg.trials).map(|trial| run_trial(cfg, trial)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(cfg, outcomes))
}

/// Checks unitarity of an exact matrix; used by callers that rationalize.
pub fn is_exact_unitary(u: &Mat<ExScalar>) -> bool {
    &u.adjoint() * u == Mat::identity(u.rows())
}

/// Largest entry of U*U − I.
pub fn unitarity_defect(u: &Mat<C64>) -> f64 {
    (&u.adjoint() * u).max_defect(&Mat::identity(u.rows()), |z| z.norm())
}

/// Determinant by elimination, for floating sanity checks.
pub fn det_c64(u: &Mat<C64>) -> C64 {
    let n = u.rows();
    let mut a = u.clone();
    let mut det = C64::new(1.0, 0.0);
    for c in 0..n {
        let Some(p) = (c..n).max_by(|&i, &j| a.get(i, c).norm().total_cmp(&a.get(j, c).norm())) else {
            return C64::new(0.0, 0.0);
        };
        if a.get(p, c).norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != c {
            for j in 0..n {
                let (x, y) = (*a.get(p, j), *a.get(c, j));
                a.set(p, j, y);
                a.set(c, j, x);
            }
            det = -det;
        }
        let pivot = *a.get(c, c);
        det *= pivot;
        for i in c + 1..n {
            let f = *a.get(i, c) / pivot;
            for j in c..n {
                let v = *a.get(i, j) - f * *a.get(c, j);
                a.set(i, j, v);
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_family, FamilySpec};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExScalar {
        ExScalar::from_frac(n, d)
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..7 {
            let u = haar_unitary(n, &mut rng).unwrap();
            assert!(unitarity_defect(&u) < 1e-12);
            assert!((det_c64(&u).norm() - 1.0).abs() < 1e-10);
        }
        assert!(haar_unitary(0, &mut rng).is_err());
    }

    #[test]
    fn haar_trace_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let samples = 2000;
        let mean = (0..samples).map(|_| haar_unitary(3, &mut rng).unwrap().trace().unwrap().norm_sqr()).sum::<f64>() / samples as f64;
        assert!((mean - 1.0).abs() < 0.1, "{mean}");
    }

    #[test]
    fn cayley_rationalization_is_close_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = haar_unitary(3, &mut rng).unwrap();
        let r = rationalize_unitary(&u, CAYLEY_DENOMINATOR).unwrap();
        assert!(is_exact_unitary(&r));
        assert!(r.map(ExScalar::to_c64).max_defect(&u, |z| z.norm()) < 0.2);
    }

    #[test]
    fn projection_examples() {
        let k = rational_unit_projection_family(4, &[1, 2, 2], &q(-1, 3)).unwrap();
        assert!(exact_verdict(&k).unwrap().0);
        let k = rational_unit_projection_family(5, &[1, 1, 2, 3], &q(-1, 4)).unwrap();
        assert!(exact_verdict(&k).unwrap().0);
        let balanced = rational_unit_projection_family_unchecked(4, &[1, 1, 1], &q(-1, 3)).unwrap();
        assert!(!exact_verdict(&balanced).unwrap().0);
        assert_eq!(balanced, build_family(&FamilySpec::key(4, q(-1, 3))).unwrap());
        assert!(matches!(rational_unit_projection_family(4, &[1, 1, 1], &q(-1, 3)), Err(Error::PreconditionFailed(_))));
        assert!(matches!(rational_unit_projection_family(4, &[1, 0, 2], &q(-1, 3)), Err(Error::PreconditionFailed(_))));
        assert!(rational_unit_projection_family(4, &[1, 2], &q(-1, 3)).is_err());
    }

    /// Unbalanced vectors with no zero entry that still give dependence,
    /// cross-checked with an independent symbolic rank computation.
    #[test]
    fn exceptional_projection_vectors() {
        for (z, rank) in [([-3, 8, 3], 12), ([1, 4, -1], 12), ([1, 1, 2], 13), ([4, -2, 2], 13)] {
            let k = rational_unit_projection_family(4, &z, &q(-1, 3)).unwrap();
            assert_eq!(exact_verdict(&k).unwrap(), (false, rank), "{z:?}");
        }
        let k = rational_unit_projection_family(4, &[3, 8, 3], &q(-1, 3)).unwrap();
        assert!(exact_verdict(&k).unwrap().0);
    }

    #[test]
    fn twelfth_roots() {
        for k in 0..12 {
            let z = twelfth_root(k);
            assert_eq!(z.times(&z.conj()), ExScalar::one());
            let want = C64::from_polar(1.0, core::f64::consts::PI * k as f64 / 6.0);
            assert!((z.to_c64() - want).norm() < 1e-12);
        }
    }

    #[test]
    fn haar_float_fraction() {
        let r = genericity_experiment(&ExperimentConfig::new(4, q(0, 1), SampleMode::HaarFloat, 20, 7)).unwrap();
        assert_eq!(r.independent_fraction, 1.0);
        assert!(r.incidents.is_empty());
        assert_eq!(r.exact_checks, 5);
    }

    #[test]
    fn other_haar_modes() {
        for mode in [SampleMode::HaarPerM, SampleMode::Partition] {
            let r = genericity_experiment(&ExperimentConfig::new(4, q(1, 3), mode, 10, 11)).unwrap();
            assert_eq!(r.independent_fraction, 1.0, "{mode}");
        }
    }

    #[test]
    fn projection_fraction() {
        let r = genericity_experiment(&ExperimentConfig::new(4, q(-1, 3), SampleMode::RationalProjection, 20, 3)).unwrap();
        assert_eq!(r.independent_fraction, 1.0);
        assert_eq!(r.exact_checks, 20);
    }

    #[test]
    fn diagonal_never_independent() {
        let r = genericity_experiment(&ExperimentConfig::new(4, q(1, 2), SampleMode::Diagonal, 10, 9)).unwrap();
        assert_eq!(r.independent_fraction, 0.0);
        assert_eq!(r.failures.len(), 10);
        assert!(r.incidents.is_empty());
    }

    #[test]
    fn deterministic_and_order_free() {
        let cfg = ExperimentConfig::new(4, q(0, 1), SampleMode::HaarPerM, 6, 42);
        let forward: Vec<TrialOutcome> = (0..6).map(|i| run_trial(&cfg, i).unwrap()).collect();
        let backward: Vec<TrialOutcome> = (0..6).rev().map(|i| run_trial(&cfg, i).unwrap()).collect();
        assert_eq!(summarize(&cfg, forward), summarize(&cfg, backward));
        assert_eq!(genericity_experiment(&cfg).unwrap(), genericity_experiment(&cfg).unwrap());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(4, q(0, 1), SampleMode::Partition, 0, 1);
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.blocks = 9;
        assert!(cfg.validate().is_err());
        cfg.blocks = 2;
        cfg.t = ExScalar::sqrt2();
        assert!(cfg.validate().is_err());
        assert_eq!("haar_per_m".parse::<SampleMode>().unwrap(), SampleMode::HaarPerM);
        assert!("haar".parse::<SampleMode>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn reflections_are_unitary(z in proptest::collection::vec(-9i64..10, 2..6)) {
            prop_assume!(z.iter().any(|&x| x != 0));
            prop_assert!(is_exact_unitary(&rank_one_reflection(&z).unwrap()));
        }

        #[test]
        fn same_seed_same_trial(seed in any::<u64>(), trial in 0usize..50) {
            let cfg = ExperimentConfig::new(3, q(1, 2), SampleMode::HaarPerM, 1, seed);
            prop_assert_eq!(run_trial(&cfg, trial).unwrap(), run_trial(&cfg, trial).unwrap());
        }
    }
}
