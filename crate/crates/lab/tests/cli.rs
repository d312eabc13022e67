use proptest::prelude::*;
use serde_json::Value;
use ucpt_lab::cli::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use ucpt_lab::json::AnalyzeReport;
use ucpt_lab::run::reverify;

fn lab(args: &[&str]) -> (u8, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("ucpt-lab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = lab(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lab(&["analyze", r#"{"family":"key","d":0}"#]).0, EXIT_USAGE);
    assert_eq!(lab(&["analyze", r#"{"family":"key","d":3,"colour":1}"#]).0, EXIT_USAGE);
    assert_eq!(lab(&["analyze", r#"{"family":"key","d":3,"t":0.5}"#]).0, EXIT_USAGE);
    assert_eq!(lab(&["verify", "--check", "no_such_check"]).0, EXIT_USAGE);
    assert_eq!(lab(&["verify"]).0, EXIT_USAGE);
    assert_eq!(lab(&["sweep", r#"{"family":"key","d":3}"#, "--interval", "1", "-1"]).0, EXIT_USAGE);
    assert_eq!(lab(&["frobnicate"]).0, EXIT_USAGE);
    let (code, out, _) = lab(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("sweep"));
}

#[test]
fn verify_single_check() {
    let v = json(&["verify", "--check", "d3_dual_factorization"]);
    assert_eq!(v["overall"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 1);
    let listed = json(&["verify", "--list"]);
    assert_eq!(listed.as_array().unwrap().len(), 15);
    assert_ne!(EXIT_FAILED, EXIT_OK);
}

#[test]
fn key_sweep_roots() {
    let v = json(&["sweep", r#"{"family":"key","d":3}"#, "--roots", "--interval", "-2", "2"]);
    let roots: Vec<_> =
        v["gram"]["roots_in_interval"].as_array().unwrap().iter().map(|r| r["root"].as_str().unwrap().to_string()).collect();
    assert_eq!(roots, ["-1", "-1/2", "1"]);
    assert_eq!(v["roots_agree"], true);
    assert!(v["gram"].get("coefficients").is_none());
}

#[test]
fn even_family_vanishes() {
    let v = json(&["sweep", r#"{"family":"even_skew","d":4}"#]);
    assert_eq!(v["gram"]["identically_zero"], true);
}

#[test]
fn alpha_beta_is_ls_extreme() {
    let v = json(&["analyze", r#"{"family":"ucpt_alpha_beta","alpha":"3/5","beta":"4/5"}"#, "--set", "LS"]);
    assert_eq!(v["verdict"]["independent"], true);
    assert_eq!(v["extremality"]["ucp_extreme"], false);
    assert_eq!(v["choi_rank"], 4);
}

#[test]
fn sampling_is_reproducible_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"d":4,"t":"-1/3","mode":"rational_projection","trials":4,"seed":9}"#).unwrap();
    let cfg_arg = format!("@{}", cfg.display());
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let (code, out, err) = lab(&["sample", &cfg_arg, "--parallel", threads, "--out", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK, "{err}");
        assert!(out.is_empty());
    }
    let (a, b) = (std::fs::read_to_string(a).unwrap(), std::fs::read_to_string(b).unwrap());
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["independent_fraction"], 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn emitted_reports_reverify(d in 3usize..5, num in -4i64..5, den in 1i64..5, float in any::<bool>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let spec = format!(r#"{{"family":"key","d":{d},"t":"{num}/{den}"}}"#);
        let backend = if float { "--float" } else { "--exact" };
        let (code, _, err) = lab(&["analyze", &spec, backend, "--out", path.to_str().unwrap()]);
        prop_assert_eq!(code, EXIT_OK, "{}", err);
        let report: AnalyzeReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        prop_assert!(reverify(&report).unwrap());
    }
}
