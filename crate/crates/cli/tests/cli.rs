use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn stenzel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stenzel")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV: comment lines and the header are dropped.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn field(row: &[String], i: usize) -> f64 {
    row[i].parse().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn verify_passes_and_detects_bracket_flip() {
    let ok = stenzel(&["verify"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(!stdout(&ok).contains("FAIL"));

    let bad = stenzel(&["verify", "--flip-bracket-sign"]);
    assert_eq!(bad.status.code(), Some(1));
    let line = stdout(&bad).lines().find(|l| l.starts_with("curvature_id")).unwrap().to_string();
    assert!(line.contains("FAIL"), "{line}");
}

#[test]
fn verify_json_has_one_record_per_identity() {
    let o = stenzel(&["verify", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = doc["checks"].as_array().unwrap();
    assert!(checks.len() >= 20);
    assert!(checks.iter().all(|c| c["pass"] == Value::Bool(true) && c["id"].is_string()));
    assert_eq!(doc["failed"], 0);
    assert_eq!(doc["config"]["command"], "verify");
}

#[test]
fn solve_hym_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hym.csv");
    let o = stenzel(&["solve", "--a0", "0", "--horizon", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# stenzel "));
    assert!(text.lines().any(|l| l == "t,a,b,dadt,dbdt,b_minus_crit"));
    let data = rows(&text);
    let at1 = data.iter().find(|r| field(r, 0) == 1.0).unwrap();
    assert_eq!(field(at1, 1), 0.0);
    assert!((field(at1, 2) - 1.0 / 2f64.sqrt()).abs() < 1e-8);
    let side = read_json(&dir.path().join("hym.json"));
    assert_eq!(side["classification"], "GlobalHorizon");
    assert_eq!(side["config"]["solve_options"]["horizon"], 20.0);
}

#[test]
fn solve_blowup_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.csv");
    let o = stenzel(&["solve", "--a0", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let side = read_json(&out.with_extension("json"));
    assert_eq!(side["classification"], "BlowupCertified");
    let bound = side["blowup_upper_bound"].as_f64().unwrap();
    assert!(bound <= 24.84, "{bound}");
    assert!(side["divergence_time"].as_f64().unwrap() <= bound);
}

#[test]
fn negative_slope_is_accepted() {
    let o = stenzel(&["solve", "--a0", "-0.4", "--horizon", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["samples"].as_array().unwrap().iter().skip(1).all(|s| s["a"].as_f64().unwrap() < 0.0));
}

#[test]
fn family_hym_row() {
    let o = stenzel(&["family", "--nu", "-0.6324555320336759", "--t-grid", "0.5:1.5:3"]);
    assert_eq!(o.status.code(), Some(0));
    let data = rows(&stdout(&o));
    let r = data.iter().find(|r| field(r, 1) == 1.0).unwrap();
    assert!((field(r, 2) + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert_eq!(r[3], "");
}

#[test]
fn family_marks_pole() {
    let o = stenzel(&["family", "--nu", "1", "--t-grid", "0.1:2:20"]);
    let data = rows(&stdout(&o));
    let tb: f64 = field(&data[0], 3);
    assert!((tb - 0.5007758).abs() < 1e-6);
    for r in &data {
        assert_eq!(r[2].is_empty(), field(r, 1) <= tb);
    }
}

#[test]
fn geometry_rows() {
    let o = stenzel(&["geometry", "--grid", "1.4142135623730951:3:4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "r,t,P,Q,calP,calQ,g_rr,g_11,g_22,g_55,cy_residual"));
    let data = rows(&text);
    assert_eq!(data.len(), 4);
    assert!(field(&data[0], 10) < 1e-12);
    assert!((field(&data[0], 1) - 1.0 / 2f64.sqrt()).abs() < 1e-15);

    let th = stenzel(&["geometry", "--threshold", "--grid", "2.1213203435596424:2.1213203435596424:1"]);
    let r = rows(&stdout(&th));
    assert!((field(&r[0], 1) - 0.8581818).abs() < 1e-6);
}

#[test]
fn critical_bracket() {
    let o = stenzel(&["critical", "--tol", "1e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (lo, hi) = (doc["x_lo"].as_f64().unwrap(), doc["x_hi"].as_f64().unwrap());
    assert!(0.0 < lo && lo < hi && hi < 0.910240 && hi - lo <= 1e-3);
    assert!(doc["certificates"].as_array().unwrap().len() > 2);
}

#[test]
fn survey_output_is_reproducible_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_stenzel"))
            .args(["survey", "--grid", "-0.9:0.9:19"])
            .env("SPIN7_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let data = rows(&stdout(&a));
    assert_eq!(data.len(), 19);
    for (x, y) in data.iter().zip(data.iter().rev()) {
        assert_eq!(x[1], y[1]);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(stenzel(&["survey", "--grid", "0:1"]).status.code(), Some(2));
    assert_eq!(stenzel(&["solve", "--a0", "0.5", "--t-switch", "0"]).status.code(), Some(2));
    assert_eq!(stenzel(&["family"]).status.code(), Some(2));
    assert_eq!(stenzel(&["nonsense"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_stenzel"))
        .args(["verify"])
        .env("SPIN7_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
    // a low-order series handed off far from the origin is inconsistent
    let o = stenzel(&["solve", "--a0", "0.5", "--order", "4", "--t-switch", "0.9"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
