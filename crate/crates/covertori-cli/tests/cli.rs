//! End-to-end checks of the binary: exit codes, report formats, and the
//! search pipeline.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_covertori"))
}

#[test]
fn gallery_report_succeeds() {
    let out = bin()
        .args(["gallery", "--name", "chen_hacon", "--report", "json"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["degree_albanese"], 4);
    assert_eq!(report["rct"]["certified"], true);
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn gallery_config_feeds_analyze() {
    let dir = std::env::temp_dir().join("covertori-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("el.json");
    let out = bin()
        .args(["gallery", "--name", "ein_lazarsfeld", "--emit", "config"])
        .args(["--out", config_path.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let out = bin()
        .args(["analyze", config_path.to_str().unwrap(), "--report", "text"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("deg(a_X): 4"), "{text}");
    assert!(text.contains("h^*(omega): [4, 6, 3, 1]"), "{text}");
}

#[test]
fn malformed_input_exits_two_with_pointer() {
    let dir = std::env::temp_dir().join("covertori-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{"kind": "product_quotient", "factors": [{"group": [2], "torsion_group": [], "classes": {"1": {"degree": 1, "torsion": []}}}], "subgroup": [[1, 0]]}"#,
    )
    .unwrap();
    let out = bin().args(["analyze", path.to_str().unwrap()]).output().expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("subgroup/0"), "{err}");
}

#[test]
fn invalid_building_data_exits_two_with_violation() {
    let dir = std::env::temp_dir().join("covertori-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("invalid.json");
    // trivial class at a nontrivial character: a disconnected cover
    std::fs::write(
        &path,
        r#"{"kind": "product_quotient", "factors": [{"group": [2], "torsion_group": [], "classes": {"1": {"degree": 0, "torsion": []}}}], "subgroup": []}"#,
    )
    .unwrap();
    let out = bin().args(["analyze", path.to_str().unwrap()]).output().expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("trivial class"), "{text}");
}

#[test]
fn search_writes_deterministic_jsonl() {
    let dir = std::env::temp_dir().join("covertori-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let spec_path = dir.join("spec.json");
    std::fs::write(
        &spec_path,
        r#"{"factors":[{"group":[2],"torsion_group":[2],"degree_bound":1},{"group":[2],"torsion_group":[2],"degree_bound":1}],"predicates":["chi_zero"],"max_space":100000}"#,
    )
    .unwrap();
    let out_a = dir.join("a.jsonl");
    let out_b = dir.join("b.jsonl");
    for (path, jobs) in [(&out_a, "1"), (&out_b, "7")] {
        let out = bin()
            .args(["search", "--spec", spec_path.to_str().unwrap()])
            .args(["--out", path.to_str().unwrap(), "--jobs", jobs])
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8_lossy(&a);
    assert!(text.lines().count() >= 2);
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!(header["spec_hash"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn oversized_search_refused_with_exit_four() {
    let dir = std::env::temp_dir().join("covertori-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let spec_path = dir.join("huge.json");
    std::fs::write(
        &spec_path,
        r#"{"factors":[{"group":[2,2],"torsion_group":[2,2],"degree_bound":2,"ample_tags":true},{"group":[2,2],"torsion_group":[2,2],"degree_bound":2,"ample_tags":true},{"group":[2,2],"torsion_group":[2,2],"degree_bound":2,"ample_tags":true}],"predicates":[],"max_space":1000}"#,
    )
    .unwrap();
    let out = bin()
        .args(["search", "--spec", spec_path.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn selftest_quick_reports_skip() {
    let out = bin().args(["selftest", "--quick"]).output().expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("skipped"), "{text}");
    assert!(!text.contains("sweeps: pass"), "{text}");
}
