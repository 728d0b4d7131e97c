//! End-to-end CLI contract tests: exit codes, config validation, report
//! determinism, and format stability.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sigma-forge")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(bin()).args(args).env(key, value).output().expect("binary runs")
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sigma-forge-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn beta_sphere_passes_with_exit_zero() {
    let out = run(&["beta", "--N", "3", "--cutoff", "6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["overall_status"], "pass");
    let notes = report["checks"][1]["notes"].as_array().unwrap();
    let joined: String = notes.iter().map(|n| n.as_str().unwrap()).collect::<Vec<_>>().join(" ");
    assert!(joined.contains("1/3 in (1/4 pi) units"), "{joined}");
    assert!(joined.contains("0.0265258"), "{joined}");
}

#[test]
fn verify_on_model_passes() {
    let out = run(&["verify-on-model", "--N", "4", "--cutoff", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn missing_flags_exit_two() {
    let out = run(&["verify-on-model"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn invalid_rational_in_config_exits_two() {
    let dir = tempdir();
    let path = dir.join("bad-coeff.json");
    std::fs::write(
        &path,
        r#"{"target":"custom","dim":2,"cutoff":4,"metric_terms":[
            {"i":0,"j":0,"multi_index":[0,0],"coeff":"1/0"}
        ]}"#,
    )
    .unwrap();
    let out = run(&["beta", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("zero denominator"), "{err}");
}

#[test]
fn asymmetric_metric_term_exits_two_with_location() {
    let dir = tempdir();
    let path = dir.join("asym.json");
    std::fs::write(
        &path,
        r#"{"target":"custom","dim":2,"cutoff":4,"metric_terms":[
            {"i":0,"j":0,"multi_index":[0,0],"coeff":"1"},
            {"i":1,"j":1,"multi_index":[0,0],"coeff":"1"},
            {"i":0,"j":1,"multi_index":[1,0],"coeff":"1"},
            {"i":1,"j":0,"multi_index":[1,0],"coeff":"2"}
        ]}"#,
    )
    .unwrap();
    let out = run(&["beta", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("asymmetric metric term"), "{err}");
    assert!(err.contains("entries 2 and 3"), "{err}");
}

#[test]
fn custom_flat_target_gives_zero_beta() {
    let dir = tempdir();
    let path = dir.join("flat.json");
    std::fs::write(
        &path,
        r#"{"target":"custom","dim":2,"cutoff":4,"chart":"normal","metric_terms":[
            {"i":0,"j":0,"multi_index":[0,0],"coeff":"1"},
            {"i":1,"j":1,"multi_index":[0,0],"coeff":"1"}
        ]}"#,
    )
    .unwrap();
    let out = run(&["beta", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["overall_status"], "pass");
    let notes = report["checks"][1]["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("flat target")));
}

#[test]
fn sphere_config_file_dispatch() {
    let dir = tempdir();
    let path = dir.join("sphere.json");
    std::fs::write(&path, r#"{"target":"sphere","N":3,"cutoff":4,"chart":"graph"}"#).unwrap();
    let out = run(&["cme", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempdir();
    let a = dir.join("run-a.json");
    let b = dir.join("run-b.json");
    let args_a = ["verify-on-model", "--N", "3", "--cutoff", "4", "--output"];
    let out = run_with_env(
        &[&args_a[..], &[a.to_str().unwrap()]].concat(),
        "SIGMA_FORGE_THREADS",
        "1",
    );
    assert_eq!(out.status.code(), Some(0));
    let out = run_with_env(
        &[&args_a[..], &[b.to_str().unwrap()]].concat(),
        "SIGMA_FORGE_THREADS",
        "4",
    );
    assert_eq!(out.status.code(), Some(0));
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    assert!(!bytes_a.is_empty());
    // LF endings only in JSON reports.
    assert!(!bytes_a.contains(&b'\r'));
}

#[test]
fn csv_has_header_and_rows() {
    let out = run(&["cme", "--N", "3", "--cutoff", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "check,target,cutoff,status,residual,notes");
    assert!(lines.next().unwrap().starts_with("cme,"));
}

#[test]
fn unwritable_output_exits_two() {
    let out = run(&[
        "cme",
        "--N",
        "3",
        "--cutoff",
        "4",
        "--output",
        "/nonexistent-dir/report.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_is_recorded_and_reports_json_roundtrip() {
    let out = run(&["verify-wick", "--dim", "1", "--max-degree", "4", "--seed", "99"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 99);
    // The classical moment record appears.
    let checks = report["checks"].as_array().unwrap();
    assert!(checks
        .iter()
        .any(|c| c["monomial"] == "x^4" && c["value"] == "3"));
}
