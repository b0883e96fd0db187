//! One pass/fail line per acceptance criterion, heavy suites included.
//!
//! Criterion 11 is expected to fail: the printed generator list contains
//! `Q^{3,1}(σ)` and `Q^{4,1}(σ)`, which are not admissible (`Q^3Q^1 = 0`,
//! `Q^4Q^1 = Q^3Q^2`).  The test asserts that this is the only discrepancy
//! and that the Σ_4 homology oracle sides with the admissible list.

use std::collections::BTreeSet;
use std::time::Instant;

use flagforge::verify::{run_suite, CheckLine, Report, SuiteParams, SuiteSpec};

const CRITERIA: &[(usize, &str, &str)] = &[
    (1, "sphericality", "buildings concentrated in the expected degree"),
    (2, "steinberg-dims", "dim St = q^(n(n-1)/2)"),
    (3, "join", "join decomposition Betti identity"),
    (4, "cutting-down", "cutting-down poset isomorphism"),
    (5, "filtration", "filtration identity for both reductions"),
    (6, "projectivity", "Steinberg module homology vanishes"),
    (7, "e1-vanishing", "E_1-Steinberg coinvariants vanish"),
    (8, "arithmetic", "line-stabilizer index and K'"),
    (9, "figure2", "H_d(GL_n(F_2); F_2) table"),
    (10, "stabilization", "H_2(GL_3) → H_2(GL_4) is zero"),
    (11, "figure4", "W_∞(σ, τ) generator table"),
    (12, "dl-claims", "symbolic differentials and E³"),
    (13, "bidegree", "bidegree inequality mechanization"),
    (14, "comparison", "BD ↪ BUT and φ_*"),
    (15, "tor", "Tor of Quillen's ring and Steinberg homology"),
];

fn strings(v: &serde_json::Value) -> BTreeSet<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

/// The documented table discrepancy, and nothing else.
fn figure4_is_documented_red(r: &Report) -> bool {
    let fails: Vec<&CheckLine> = r.failures().collect();
    if fails.len() != 1 || fails[0].check != "figure4" {
        return false;
    }
    let (expected, got) = (strings(&fails[0].expected), strings(&fails[0].got));
    let missing: BTreeSet<String> = expected.difference(&got).cloned().collect();
    let extra: BTreeSet<String> = got.difference(&expected).cloned().collect();
    let oracle = r.lines.iter().any(|l| l.check == "symmetric_group_oracle" && l.pass);
    extra.is_empty() && missing == BTreeSet::from(["Q^{3,1}(σ)".to_string(), "Q^{4,1}(σ)".to_string()]) && oracle
}

#[test]
fn acceptance() {
    let mut unexpected = Vec::new();
    for &(k, suite, what) in CRITERIA {
        let t = Instant::now();
        let spec = SuiteSpec::with(suite, SuiteParams { heavy: Some(true), ..Default::default() });
        let report = run_suite(&spec).expect("suite runs");
        let passed = report.lines.iter().filter(|l| l.pass).count();
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {k:>2} [{suite}] {what}: {verdict} ({passed}/{} checks, {:.1}s)",
            report.lines.len(),
            t.elapsed().as_secs_f64()
        );
        for l in report.failures() {
            println!("    failed {} {} expected {} got {}", l.check, l.params, l.expected, l.got);
        }
        let documented = k == 11 && figure4_is_documented_red(&report);
        if !report.passed() && !documented {
            unexpected.push(k);
        }
        assert!(!report.lines.is_empty(), "criterion {k} ran no checks");
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
