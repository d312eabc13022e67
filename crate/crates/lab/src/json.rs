//! JSON forms of the core types.
//!
//! Exact scalars never pass through floating point. A rational is the string
//! `"a/b"`; anything else is an object keyed by surd, each value a Gaussian
//! rational: `{"1": "1/2", "sqrt3": "1/2 i"}` is ½ + (√3/2)·i. Parsing accepts
//! either form, and the string form takes any expression the scalar parser
//! understands (`"3i/5"`, `"(1+sqrt3)/sqrt2"`).

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use ucpt_core::channels::{FamilyName, FamilySpec};
use ucpt_core::extremality::{ExtremalityVerdict, IndependenceVerdict};
use ucpt_core::field::{gaussian_text, IntervalRoot, RootReport, Surd};
use ucpt_core::sampling::{ExperimentConfig, ExperimentReport, SampleMode, TrialOutcome};
use ucpt_core::{ExScalar, Mat, Rational};

use crate::LabError;

/// An exact scalar in its JSON form.
#[derive(Debug, Clone, PartialEq)]
pub struct Exact(pub ExScalar);

impl From<ExScalar> for Exact {
    fn from(x: ExScalar) -> Self {
        Exact(x)
    }
}

impl From<&Rational> for Exact {
    fn from(r: &Rational) -> Self {
        Exact(ExScalar::from_rational(r.clone()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExactRepr {
    Text(String),
    Parts(BTreeMap<String, String>),
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self.0.as_rational() {
            Some(r) => ExactRepr::Text(r.to_string()),
            None => ExactRepr::Parts(
                Surd::ALL
                    .into_iter()
                    .filter_map(|surd| {
                        let (re, im) = self.0.part(surd);
                        let text = gaussian_text(&re, &im);
                        (text != "0").then(|| (surd.key().to_string(), text))
                    })
                    .collect(),
            ),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match ExactRepr::deserialize(de)? {
            ExactRepr::Text(s) => s.parse::<ExScalar>().map(Exact).map_err(D::Error::custom),
            ExactRepr::Parts(map) => {
                let mut parts: [(Rational, Rational); 4] = Default::default();
                for (key, text) in map {
                    let surd = Surd::from_key(&key).ok_or_else(|| D::Error::custom(format!("unknown surd key {key:?}")))?;
                    let x: ExScalar = text.parse().map_err(D::Error::custom)?;
                    let (re, im) = x.part(Surd::One);
                    if x != ExScalar::from_gaussian(re.clone(), im.clone()) {
                        return Err(D::Error::custom(format!("{key}: {text:?} is not a Gaussian rational")));
                    }
                    parts[Surd::ALL.iter().position(|s| *s == surd).unwrap_or(0)] = (re, im);
                }
                Ok(Exact(ExScalar::from_parts(parts)))
            }
        }
    }
}

pub fn matrix_to_json(m: &Mat<ExScalar>) -> Vec<Vec<Exact>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| Exact(m.get(i, j).clone())).collect()).collect()
}

pub fn matrix_from_json(rows: &[Vec<Exact>]) -> Result<Mat<ExScalar>, LabError> {
    Ok(Mat::from_rows(rows.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect())?)
}

/// A family member as given on the command line, e.g.
/// `{"family":"key","d":4,"t":"-1/3"}`. The parameter `t` may be omitted
/// for symbolic sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_list: Option<Vec<Vec<Vec<Exact>>>>,
}

fn fixed_dimension(family: FamilyName) -> Option<usize> {
    match family {
        FamilyName::UcptAlphaBeta | FamilyName::ArvesonOhno => Some(3),
        FamilyName::D6Xy => Some(6),
        _ => None,
    }
}

impl SpecJson {
    pub fn parse(text: &str) -> Result<SpecJson, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Input(format!("family spec: {e}")))
    }

    pub fn to_spec(&self) -> Result<FamilySpec, LabError> {
        let family: FamilyName = self.family.parse()?;
        let v_list = self.v_list.as_ref().map(|vs| vs.iter().map(|v| matrix_from_json(v)).collect::<Result<Vec<_>, _>>()).transpose()?;
        let d = match (fixed_dimension(family), self.d, &v_list) {
            (Some(fixed), Some(d), _) if d != fixed => {
                return Err(LabError::Input(format!("{family} has d = {fixed}, got {d}")));
            }
            (Some(fixed), ..) => fixed,
            (None, Some(d), _) => d,
            (None, None, Some(vs)) => vs.len(),
            (None, None, None) => return Err(LabError::Input(format!("{family} needs \"d\""))),
        };
        if d < 2 {
            return Err(LabError::Input(format!("d = {d} is too small")));
        }
        if family == FamilyName::UcptAlphaBeta && (self.alpha.is_none() || self.beta.is_none()) {
            return Err(LabError::Input(String::from("ucpt_alpha_beta needs \"alpha\" and \"beta\"")));
        }
        Ok(FamilySpec {
            family,
            d,
            t: self.t.as_ref().map(|x| x.0.clone()),
            alpha: self.alpha.as_ref().map(|x| x.0.clone()),
            beta: self.beta.as_ref().map(|x| x.0.clone()),
            v_list,
        })
    }

    pub fn from_spec(spec: &FamilySpec) -> SpecJson {
        let exact = |x: &Option<ExScalar>| x.clone().map(Exact);
        SpecJson {
            family: spec.family.as_str().to_string(),
            d: Some(spec.d),
            t: exact(&spec.t),
            alpha: exact(&spec.alpha),
            beta: exact(&spec.beta),
            v_list: spec.v_list.as_ref().map(|vs| vs.iter().map(matrix_to_json).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub set: String,
    pub independent: bool,
    pub rank: usize,
    pub expected: usize,
    pub nullity: usize,
    /// Coefficients of a vanishing combination, exact backend only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Exact>>,
}

impl VerdictJson {
    pub fn exact(v: &IndependenceVerdict, set: &str) -> VerdictJson {
        VerdictJson {
            set: set.to_string(),
            independent: v.independent,
            rank: v.rank,
            expected: v.expected,
            nullity: v.nullity,
            witness: v.witness.as_ref().map(|w| w.iter().cloned().map(Exact).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalityJson {
    pub ucp_extreme: bool,
    pub cpt_extreme: bool,
    pub ucpt_extreme_ls: bool,
    pub kraus_rank: usize,
    pub consistent: bool,
}

impl From<ExtremalityVerdict> for ExtremalityJson {
    fn from(v: ExtremalityVerdict) -> Self {
        ExtremalityJson {
            ucp_extreme: v.ucp_extreme,
            cpt_extreme: v.cpt_extreme,
            ucpt_extreme_ls: v.ucpt_extreme_ls,
            kraus_rank: v.kraus_rank,
            consistent: v.consistent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub spec: SpecJson,
    pub backend: Backend,
    /// Relative rank cutoff of the float backend.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub verdict: VerdictJson,
    pub extremality: ExtremalityJson,
    pub choi_rank: usize,
    pub ucpt: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRootJson {
    pub root: Exact,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericRootJson {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IntervalRootJson {
    Exact { root: Exact, multiplicity: usize },
    Numeric { root: f64, multiplicity: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReportJson {
    /// Coefficients from the constant term up; omitted under `--roots`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Exact>>,
    pub degree: Option<usize>,
    pub degree_bound: Option<usize>,
    pub within_degree_bound: bool,
    pub identically_zero: bool,
    pub certified: bool,
    pub interval: (Exact, Exact),
    pub exact_roots: Vec<ExactRootJson>,
    pub numeric_roots: Vec<NumericRootJson>,
    pub roots_in_interval: Vec<IntervalRootJson>,
}

impl RootReportJson {
    pub fn new(r: &RootReport, with_coefficients: bool) -> RootReportJson {
        RootReportJson {
            coefficients: with_coefficients.then(|| r.polynomial.coeffs().iter().cloned().map(Exact).collect()),
            degree: r.degree(),
            degree_bound: r.degree_bound,
            within_degree_bound: r.within_degree_bound(),
            identically_zero: r.identically_zero,
            certified: r.certified,
            interval: ((&r.interval.0).into(), (&r.interval.1).into()),
            exact_roots: r.exact_roots.iter().map(|(x, m)| ExactRootJson { root: x.into(), multiplicity: *m }).collect(),
            numeric_roots: r
                .numeric_roots
                .iter()
                .map(|n| NumericRootJson { re: n.value.re, im: n.value.im, residual: n.residual, multiplicity: n.multiplicity })
                .collect(),
            roots_in_interval: r
                .roots_in_interval
                .iter()
                .map(|root| match root {
                    IntervalRoot::Exact(x, m) => IntervalRootJson::Exact { root: x.into(), multiplicity: *m },
                    IntervalRoot::Numeric(x, m) => IntervalRootJson::Numeric { root: *x, multiplicity: *m },
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: SpecJson,
    pub set: String,
    /// det of the Gram matrix of the product set.
    pub gram: RootReportJson,
    /// det of the matrix of vectorized products; absent when it is not square.
    pub vec: Option<RootReportJson>,
    /// Both determinants have the same roots (ignoring multiplicity).
    pub roots_agree: Option<bool>,
}

/// Sampling configuration, e.g. `{"d":4,"t":"0","mode":"haar_float","trials":50,"seed":7}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigJson {
    pub d: usize,
    pub t: Exact,
    pub mode: String,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spot_checks: Option<usize>,
}

impl ConfigJson {
    pub fn parse(text: &str) -> Result<ConfigJson, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Input(format!("sampling config: {e}")))
    }

    pub fn to_config(&self) -> Result<ExperimentConfig, LabError> {
        let mode: SampleMode = self.mode.parse()?;
        let mut cfg = ExperimentConfig::new(self.d, self.t.0.clone(), mode, self.trials, self.seed);
        if let Some(tol) = self.tolerance {
            cfg.tolerance = tol;
        }
        if let Some(b) = self.blocks {
            cfg.blocks = b;
        }
        if let Some(s) = self.spot_checks {
            cfg.spot_checks = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_config(cfg: &ExperimentConfig) -> ConfigJson {
        ConfigJson {
            d: cfg.d,
            t: Exact(cfg.t.clone()),
            mode: cfg.mode.as_str().to_string(),
            trials: cfg.trials,
            seed: cfg.seed,
            tolerance: Some(cfg.tolerance),
            blocks: Some(cfg.blocks),
            spot_checks: Some(cfg.spot_checks),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialJson {
    pub trial: usize,
    pub independent: bool,
    pub rank: usize,
    pub exact: Option<bool>,
    pub incident: bool,
    pub sample: String,
}

impl From<&TrialOutcome> for TrialJson {
    fn from(o: &TrialOutcome) -> Self {
        TrialJson {
            trial: o.trial,
            independent: o.independent,
            rank: o.rank,
            exact: o.exact,
            incident: o.incident,
            sample: o.sample.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub config: ConfigJson,
    pub expected_rank: usize,
    pub independent_fraction: f64,
    pub exact_checks: usize,
    pub failures: Vec<TrialJson>,
    pub incidents: Vec<TrialJson>,
}

impl From<&ExperimentReport> for SampleReport {
    fn from(r: &ExperimentReport) -> Self {
        SampleReport {
            config: ConfigJson::from_config(&r.config),
            expected_rank: r.expected_rank,
            independent_fraction: r.independent_fraction,
            exact_checks: r.exact_checks,
            failures: r.failures.iter().map(TrialJson::from).collect(),
            incidents: r.incidents.iter().map(TrialJson::from).collect(),
        }
    }
}
