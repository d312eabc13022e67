//! The fourteen acceptance criteria, each backed by one or more registered
//! checks. Lines go straight to stdout so they show without `--nocapture`.

use std::io::Write;

use ucpt_lab::checks::{find, run_check, CheckOutcome};

const CRITERIA: &[(&str, &[&str])] = &[
    ("pair-operator spectra", &["omega_spectra"]),
    ("key family determinant roots", &["key_family_roots"]),
    ("key family at fixed t", &["key_family_fixed_t"]),
    ("odd antidiagonal family", &["odd_family"]),
    ("even antidiagonal family", &["even_family"]),
    ("asymmetric root lists", &["appendix_b_roots"]),
    ("alpha-beta family and decompositions", &["alpha_beta_family"]),
    ("entanglement of formation bounds", &["eof_bounds"]),
    ("exact factorizations", &["factorizations", "d3_dual_factorization"]),
    ("Arveson-Ohno premises", &["arveson_ohno_premises"]),
    ("d = 4 condition checker", &["d4_conditions"]),
    ("band width", &["band_width"]),
    ("sampled genericity", &["sampling"]),
    ("determinant degree bounds", &["degree_bounds"]),
];

fn describe(o: &CheckOutcome) -> String {
    let mut s = format!("{} {:.0} ms / {:.0} ms", o.name, o.runtime_ms, o.time_limit_ms);
    for f in &o.failures {
        s.push_str(&format!("\n      {f}"));
    }
    s
}

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for (i, (title, names)) in CRITERIA.iter().enumerate() {
        let outcomes: Vec<_> = names.iter().map(|n| run_check(find(n).expect("registered check"))).collect();
        let passed = outcomes.iter().all(|o| o.passed);
        let detail: Vec<_> = outcomes.iter().map(describe).collect();
        let _ = writeln!(
            std::io::stdout().lock(),
            "[{}] criterion {:>2} {title}: {}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            detail.join("; ")
        );
        if !passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
