use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn shsbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shsbm")).args(args).env_remove("SHSBM_JOBS").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_recover_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":9,"r":2,"k":3,"m":3,"p":1.0,"q":0.0}"#);
    let w = dir.path().join("w.json");
    let out = shsbm(&["sample", "--config", s(&cfg), "--seed", "5", "--out", s(&w)]);
    assert!(out.status.success());
    let rec = shsbm(&["recover", "--weights", s(&w), "--r", "2", "--k", "3"]);
    assert_eq!(rec.status.code(), Some(0));
    let v = json(&rec);
    assert_eq!(v["success"], true);
    assert_eq!(v["unique"], true);
    assert_eq!(v["argmax_count"], 1);
    assert_eq!(v["best_score"], 2.0);
}

#[test]
fn sample_is_deterministic_and_truth_file_is_used() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":6,"r":1,"k":3,"m":2,"p":0.7,"q":0.2}"#);
    let a = shsbm(&["sample", "--config", s(&cfg), "--seed", "11"]);
    let b = shsbm(&["sample", "--config", s(&cfg), "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let truth = write(dir.path(), "t.json", "[0,1,0,1,0,1]");
    let c = json(&shsbm(&["sample", "--config", s(&cfg), "--truth", s(&truth), "--sparse"]));
    assert_eq!(c["truth"], serde_json::json!([0, 1, 0, 1, 0, 1]));
    assert_eq!(c["default_weight"], 0.0);
}

#[test]
fn recover_minimize_and_external_truth() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":6,"r":2,"k":2,"m":2,"p":0.0,"q":1.0}"#);
    let truth = write(dir.path(), "t.json", "[2,0,1,0,1,2]");
    let w = dir.path().join("w.json");
    assert!(shsbm(&["sample", "--config", s(&cfg), "--truth", s(&truth), "--out", s(&w)]).status.success());
    let v = json(&shsbm(&["recover", "--weights", s(&w), "--minimize", "--truth", s(&truth)]));
    assert_eq!(v["success"], true);
    let v = json(&shsbm(&["recover", "--weights", s(&w)]));
    assert_eq!(v["success"], false);
}

#[test]
fn guard_exceeded_is_exit_one_with_error_json() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":30,"r":2,"k":6,"m":2,"p":0.9,"q":0.1}"#);
    let w = dir.path().join("w.json");
    assert!(shsbm(&["sample", "--config", s(&cfg), "--sparse", "--out", s(&w)]).status.success());
    let out = shsbm(&["recover", "--weights", s(&w), "--r", "2", "--k", "6", "--max-classes", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"], "guard_exceeded");
    assert!(v["message"].as_str().unwrap().contains("cap 1000"));
}

#[test]
fn usage_errors_are_exit_two() {
    assert_eq!(shsbm(&["recover", "--weights", "w.json", "--bogus"]).status.code(), Some(2));
    assert_eq!(shsbm(&["threshold"]).status.code(), Some(2));
    assert_eq!(shsbm(&["nope"]).status.code(), Some(2));
    assert_eq!(shsbm(&["threshold", "--config", "c.json", "--c0", "abc"]).status.code(), Some(2));
}

#[test]
fn invalid_inputs_are_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "c.json", r#"{"n":6,"r":3,"k":3,"m":2,"p":0.7,"q":0.2}"#);
    let out = shsbm(&["threshold", "--config", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["error"].is_string());
    let missing = shsbm(&["threshold", "--config", s(&dir.path().join("none.json"))]);
    assert_eq!(json(&missing)["error"], "io");
    let ok = write(dir.path(), "ok.json", r#"{"n":6,"r":1,"k":3,"m":2,"p":0.7,"q":0.2}"#);
    let out = shsbm(&["threshold", "--config", s(&ok), "--c0", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = shsbm(&["threshold", "--config", s(&ok), "--preset", "planted_sbm"]);
    assert_eq!(json(&out)["error"], "preset_mismatch");
}

#[test]
fn threshold_report_and_presets() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":12,"r":1,"k":4,"m":2,"p":0.9,"q":0.1}"#);
    let out = shsbm(&["threshold", "--config", s(&cfg), "--c0", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let want = 0.5 * 4.0 * 3f64.ln() / 6.0;
    assert!((v["lower_rhs"].as_f64().unwrap() - want).abs() < 1e-12);
    let v = json(&shsbm(&["threshold", "--config", s(&cfg), "--preset", "densest_sub"]));
    assert_eq!(v["preset"]["model"], "densest_sub");
    let v = json(&shsbm(&["threshold", "--config", s(&cfg), "--mode", "sigma"]));
    assert!(v["signal_ratio_sigma"].is_number());
}

#[test]
fn batch_output_is_independent_of_jobs() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":7,"r":2,"k":2,"m":2,"p":0.8,"q":0.3}"#);
    let run = |jobs: &str| {
        shsbm(&["batch", "--config", s(&cfg), "--trials", "40", "--seed", "2", "--per-trial", "--jobs", jobs]).stdout
    };
    let a = run("1");
    assert_eq!(a, run("8"));
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["per_trial"].as_array().unwrap().len(), 40);
    let env = Command::new(env!("CARGO_BIN_EXE_shsbm"))
        .args(["batch", "--config", s(&cfg), "--trials", "40", "--seed", "2", "--per-trial"])
        .env("SHSBM_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a);
}

#[test]
fn batch_fixed_truth() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":6,"r":1,"k":3,"m":2,"p":1.0,"q":0.0,"family":"point_mass"}"#);
    let truth = write(dir.path(), "t.json", "[1,1,1,0,0,0]");
    let v = json(&shsbm(&["batch", "--config", s(&cfg), "--trials", "10", "--fixed-truth", s(&truth)]));
    assert_eq!(v["rate"], 1.0);
    assert_eq!(v["fixed_truth"], true);
}

#[test]
fn sweep_writes_csv_svg_and_json() {
    let dir = TempDir::new().unwrap();
    let grid = write(dir.path(), "g.json", r#"{"n":6,"r":1,"k":3,"m":2,"p":[0.3,0.9],"q":[0.1,0.5]}"#);
    let (csv, svg, out) = (dir.path().join("s.csv"), dir.path().join("s.svg"), dir.path().join("s.json"));
    let res = shsbm(&[
        "sweep", "--grid", s(&grid), "--trials", "20", "--seed", "1", "--csv", s(&csv), "--svg", s(&svg), "--out", s(&out),
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let table = fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert!(lines.next().unwrap().starts_with("n,r,k,m,p,q,trials,successes,rate,wilson_low,wilson_high,d_pq"));
    assert_eq!(lines.count(), 4);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let bad = write(dir.path(), "bad.json", r#"{"n":6,"p":[0.3]}"#);
    let out = shsbm(&["sweep", "--grid", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "malformed_grid");
}

#[test]
fn verify_suite_subset_passes() {
    let out = shsbm(&["verify", "--suite", "d_range,count_formula", "--max-n", "6", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
    let out = shsbm(&["verify", "--suite", "no_such_check"]);
    assert_eq!(json(&out)["error"], "unknown_lemma");
}

#[test]
fn mi_reports_exact_value() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":3,"r":1,"k":2,"m":2,"p":0.8,"q":0.3}"#);
    let v = json(&shsbm(&["mi", "--config", s(&cfg)]));
    assert!((v["exact_mi"].as_f64().unwrap() - 0.3277556715863092).abs() < 1e-10);
    assert!(v["slack"].as_f64().unwrap() >= 0.0);
}

#[test]
fn fano_rejects_multiple_communities() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"n":6,"r":2,"k":3,"m":2,"p":0.8,"q":0.3}"#);
    let out = shsbm(&["fano", "--config", s(&cfg), "--trials", "10"]);
    assert_eq!(json(&out)["error"], "preset_mismatch");
}

#[test]
fn tail_checks_run() {
    let v = json(&shsbm(&["tail", "--bound", "hoeffding", "--samples", "10000", "--seed", "3"]));
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
    let out = shsbm(&["tail", "--samples", "10"]);
    assert_eq!(json(&out)["error"], "invalid_tail_check");
}
