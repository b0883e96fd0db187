use std::process::Command;

fn flagforge(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_flagforge")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn unknown_suite_exits_nonzero() {
    let (code, _) = flagforge(&["verify", "nothing"]);
    assert_eq!(code, 2);
}

#[test]
fn figure2_suite_passes_and_is_deterministic() {
    let (code, a) = flagforge(&["verify", "figure2"]);
    assert_eq!(code, 0);
    let (_, b) = flagforge(&["verify", "figure2"]);
    assert_eq!(a, b);
    for line in a.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true);
        assert!(!v["paper_ref"].as_str().unwrap().is_empty());
    }
}

#[test]
fn figure4_suite_reports_the_table_mismatch() {
    let (code, out) = flagforge(&["verify", "figure4"]);
    assert_eq!(code, 1);
    assert!(out.lines().any(|l| l.contains("\"check\":\"figure4\"") && l.contains("\"pass\":false")));
}

#[test]
fn dl_apply_normal_form() {
    let (code, out) = flagforge(&["dl", "apply", "Q[2](sigma*Q[1](sigma))"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["normal_form"], "σ^2·Q^{2,1}(σ) + Q^1(σ)^3");
}

#[test]
fn betti_of_a_circle() {
    let dir = std::env::temp_dir().join(format!("flagforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("circle.txt");
    std::fs::write(&path, "1 0 1\n1 1 2\n1 0 2\n").unwrap();
    let (code, out) = flagforge(&["betti", "--complex", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["betti"], serde_json::json!([0, 0, 1]));
}
