//! End-to-end tests of the command-line interface: output schemas,
//! certificate files, exit codes, and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn twopage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twopage"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn table1_json_envelope() {
    let out = twopage(&["table1", "--n", "5", "--n", "7"]);
    let v = stdout_json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "table1");
    assert_eq!(v["config"]["n"], serde_json::json!([5, 7]));
    let rows = v["result"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["maxcut"], 4);
    assert_eq!(rows[0]["nu2"], 1);
    assert_eq!(rows[1]["maxcut"], 26);
    assert_eq!(rows[1]["nu2"], 9);
    assert_eq!(rows[1]["z"], 9);
    assert_eq!(rows[1]["exact"], true);
}

#[test]
fn maxcut_is_deterministic() {
    let a = twopage(&["maxcut", "--n", "7"]);
    let b = twopage(&["maxcut", "--n", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["result"]["optimum"], 26);
    assert_eq!(v["result"]["proof_status"], "exact");
    let witness = v["result"]["witness"].as_str().unwrap();
    assert_eq!(witness.len(), 14);
}

#[test]
fn maxcut_budget_exhaustion_exit_code() {
    let out = twopage(&["maxcut", "--n", "9", "--budget-nodes", "2"]);
    assert_eq!(out.status.code(), Some(5), "budget exhaustion exits 5");
}

#[test]
fn gw_certificate_file_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("gw7.json");
    let out = twopage(&["gw", "--n", "7", "--out", cert.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["command"], "gw");
    assert!(v["result"]["implied_nu2_lower"].as_u64().unwrap() >= 1);

    let out = twopage(&["verify", cert.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["result"]["valid"], true);

    // flip one coefficient downward: the certificate must be rejected
    let mut parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let y0 = parsed["y"][0].as_f64().unwrap();
    parsed["y"][0] = serde_json::json!(y0 - 0.05);
    let bad = dir.path().join("gw7_bad.json");
    std::fs::write(&bad, serde_json::to_string(&parsed).unwrap()).unwrap();
    let out = twopage(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "tampered certificate exits 3");
}

#[test]
fn zar_certificate_roundtrip_via_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("zar3.json");
    let out = twopage(&["zar", "--m", "3", "--out", cert.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let t = v["result"]["certified_t"].as_f64().unwrap();
    assert!((t - 0.5).abs() < 1e-3, "t = {t}");

    let out = twopage(&["verify", cert.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn verify_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"kind\": \"mystery\"}").unwrap();
    let out = twopage(&["verify", junk.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    let out = twopage(&["verify", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn draw_writes_loadable_drawing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k56.json");
    let out = twopage(&["draw", "--m", "5", "--n", "6", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let d = twopage::TwoPageDrawing::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(twopage::count_crossings(&d).unwrap(), 24);

    // witness drawing for K_5 via the max-cut pipeline
    let path = dir.path().join("k5.json");
    let out = twopage(&["draw", "--n", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let d = twopage::TwoPageDrawing::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(twopage::count_crossings(&d).unwrap(), 1);
}

#[test]
fn qmatrix_csv_shape() {
    let out = twopage(&["qmatrix", "--m", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.trim().lines().collect();
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r.split(',').count() == 24));
}

#[test]
fn ratio_curve_csv() {
    let out = twopage(&["ratio-curve", "--n", "9", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,bound,z,ratio"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("9,"));
}

#[test]
fn bad_inputs_exit_4() {
    // even n has no reduced formulation
    let out = twopage(&["gw", "--n", "6"]);
    assert_eq!(out.status.code(), Some(4));
    // chord graphs need n >= 4
    let out = twopage(&["maxcut", "--n", "3"]);
    assert_eq!(out.status.code(), Some(4));
    // unknown flag
    let out = twopage(&["table1", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(4));
}
