//! Command drivers. Each returns a report value; printing is left to the CLI.

use rayon::prelude::*;
use rayon::ThreadPool;
use ucpt_core::channels::{build_family, build_family_float, check_ucpt, choi, FamilySpec};
use ucpt_core::extremality::{
    combination, extremality_verdict, float_independence, gram_det_poly, independent_generators, product_set, set_independence,
    vec_det_poly, SetKind,
};
use ucpt_core::field::{find_roots, RootReport};
use ucpt_core::sampling::{run_trial, summarize, ExperimentConfig, ExperimentReport};
use ucpt_core::{Error, Rational, Ring};

use crate::json::{AnalyzeReport, Backend, ExtremalityJson, RootReportJson, SpecJson, SweepReport, VerdictJson};
use crate::{LabError, LabResult};

pub const THREADS_ENV: &str = "UCPT_LAB_THREADS";

/// Worker count: the environment variable wins over the flag, which wins over
/// the number of available cores.
pub fn thread_count(flag: Option<usize>) -> LabResult<usize> {
    let from_env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| LabError::Input(format!("{THREADS_ENV}={v:?} is not a count")))?),
        Err(_) => None,
    };
    let n = from_env.or(flag).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
    if n == 0 {
        return Err(LabError::Input(String::from("worker count must be at least 1")));
    }
    Ok(n)
}

pub fn pool(threads: usize) -> LabResult<ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| LabError::Input(e.to_string()))
}

pub fn analyze(spec: &FamilySpec, set: SetKind, backend: Backend, tolerance: f64) -> LabResult<AnalyzeReport> {
    let spec_json = SpecJson::from_spec(spec);
    match backend {
        Backend::Exact => {
            let k = build_family(spec)?;
            Ok(AnalyzeReport {
                spec: spec_json,
                backend,
                tolerance: None,
                verdict: VerdictJson::exact(&set_independence(&k, set)?, set.as_str()),
                extremality: extremality_verdict(&k)?.into(),
                choi_rank: choi(&k)?.rank,
                ucpt: check_ucpt(&k).is_ucpt(),
            })
        }
        Backend::Float => {
            let k = build_family_float(spec)?;
            let (rank, expected) = float_independence(&product_set(&k, set), tolerance)?;
            let basis = independent_generators(&k)?;
            let independent = |kind| -> LabResult<bool> {
                let (r, n) = float_independence(&product_set(&basis, kind), tolerance)?;
                Ok(r == n)
            };
            let (ucp, cpt, ls) = (independent(SetKind::AstarA)?, independent(SetKind::AAstar)?, independent(SetKind::LandauStreater)?);
            Ok(AnalyzeReport {
                spec: spec_json,
                backend,
                tolerance: Some(tolerance),
                verdict: VerdictJson {
                    set: set.as_str().to_string(),
                    independent: rank == expected,
                    rank,
                    expected,
                    nullity: expected - rank,
                    witness: None,
                },
                extremality: ExtremalityJson {
                    ucp_extreme: ucp,
                    cpt_extreme: cpt,
                    ucpt_extreme_ls: ls,
                    kraus_rank: basis.len(),
                    consistent: !(ucp || cpt) || ls,
                },
                choi_rank: choi(&k)?.rank,
                ucpt: check_ucpt(&k).is_ucpt(),
            })
        }
    }
}

/// Re-reads an emitted report, rebuilds the family from its spec, checks any
/// witness exactly and recomputes the whole verdict.
pub fn reverify(report: &AnalyzeReport) -> LabResult<bool> {
    let spec = report.spec.to_spec()?;
    let set: SetKind = report.verdict.set.parse()?;
    if let Some(w) = &report.verdict.witness {
        let k = build_family(&spec)?;
        let coeffs: Vec<_> = w.iter().map(|x| x.0.clone()).collect();
        let prods = product_set(&k, set);
        if coeffs.len() != prods.len() || coeffs.iter().all(Ring::is_zero) || !combination(&prods, &coeffs)?.is_zero() {
            return Ok(false);
        }
    }
    let again = analyze(&spec, set, report.backend, report.tolerance.unwrap_or(ExperimentConfig::DEFAULT_TOLERANCE))?;
    Ok(again == *report)
}

fn restrict(mut r: RootReport, interval: &Option<(Rational, Rational)>) -> RootReport {
    if let Some(iv) = interval {
        let bound = r.degree_bound;
        r = find_roots(&r.polynomial, iv.clone());
        r.degree_bound = bound;
    }
    r
}

/// Both determinant routes for a family with `t` symbolic, computed side by side.
pub fn sweep_reports(
    spec: &FamilySpec,
    set: SetKind,
    interval: Option<(Rational, Rational)>,
    pool: &ThreadPool,
) -> LabResult<(RootReport, Option<RootReport>)> {
    let (gram, vec) = pool.join(|| gram_det_poly(spec, set), || vec_det_poly(spec, set));
    let vec = match vec {
        Ok(r) => Some(restrict(r, &interval)),
        Err(Error::Shape(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok((restrict(gram?, &interval), vec))
}

pub fn sweep(
    spec: &FamilySpec,
    set: SetKind,
    interval: Option<(Rational, Rational)>,
    with_coefficients: bool,
    pool: &ThreadPool,
) -> LabResult<SweepReport> {
    let (gram, vec) = sweep_reports(spec, set, interval, pool)?;
    Ok(SweepReport {
        spec: SpecJson::from_spec(&FamilySpec { t: None, ..spec.clone() }),
        set: set.as_str().to_string(),
        roots_agree: vec.as_ref().map(|v| v.same_root_set(&gram)),
        gram: RootReportJson::new(&gram, with_coefficients),
        vec: vec.as_ref().map(|v| RootReportJson::new(v, with_coefficients)),
    })
}

/// Trials fan out over the pool; outcomes are merged by trial index, so the
/// report does not depend on scheduling.
pub fn sample(cfg: &ExperimentConfig, pool: &ThreadPool) -> LabResult<ExperimentReport> {
    cfg.validate()?;
    let outcomes = pool.install(|| (0..cfg.trials).into_par_iter().map(|trial| run_trial(cfg, trial)).collect::<Result<Vec<_>, _>>())?;
    Ok(summarize(cfg, outcomes))
}
