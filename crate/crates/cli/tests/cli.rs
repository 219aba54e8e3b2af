use serde_json::Value;
use std::f64::consts::TAU;
use std::process::{Command, Output};

fn elliptica(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elliptica")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = elliptica(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn temp_path(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("elliptica-{}-{name}", std::process::id()))
}

#[test]
fn classify_torus_point_in_sp4() {
    let r = json(&["--group", "sp4", "classify", "--angles", "1/2,1/4"]);
    assert_eq!(r["elliptic"], true);
    assert_eq!(r["stably_elliptic"], true);
    assert_eq!(r["component"]["canonical"], serde_json::json!([0, 0, 0]));
    assert_eq!(r["basic"], true);
    assert!(r["tau"].is_f64());
    // mean of the root values pi, pi/2 and 3 pi / 4
    let f = r["f_gw"]["value"].as_f64().unwrap();
    assert!((f - 0.75 * std::f64::consts::PI).abs() < 1e-12, "{f}");
}

#[test]
fn minus_identity_is_elliptic_but_not_stably() {
    let r = json(&["--group", "sl2", "classify", "--matrix", "-1,0;0,-1"]);
    assert_eq!(r["elliptic"], true);
    assert_eq!(r["stably_elliptic"], false);
    assert!(r["component"].is_null());
}

#[test]
fn hyperbolic_word_has_no_component() {
    let r = json(&["--group", "sl2", "classify", "--word", "0,1,0|0,0,0.5"]);
    assert_eq!(r["elliptic"], false);
    assert!(r["component"].is_null());
    assert!(r["f_gw"]["value"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn atlas_counts_for_sl2_covers() {
    for (lattice, n) in [("universal", 7), ("SL2", 2), ("PSL2", 1)] {
        let r = json(&["--group", "sl2", "--lattice", lattice, "atlas", "--bound", "3"]);
        assert_eq!(r["classes"], n, "{lattice}");
    }
}

#[test]
fn atlas_su21_has_one_class_mod_the_integral_lattice() {
    let r = json(&["--group", "su(2,1)", "--lattice", "integral", "atlas", "--bound", "2"]);
    assert_eq!(r["classes"], 1);
    assert_eq!(r["entries"][0]["class"]["canonical"], serde_json::json!([0, 0]));
}

#[test]
fn atlas_rejects_large_boxes() {
    assert_eq!(elliptica(&["atlas", "--bound", "7"]).status.code(), Some(1));
}

#[test]
fn z_ray_tau_column_matches_log_formula() {
    let path = temp_path("zray.csv");
    let p = path.to_str().unwrap();
    let r = json(&["--group", "sl2", "--csv", p, "causal", "--curve", "z-ray", "--steps", "40"]);
    assert_eq!(r["kind"], "timelike");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# elliptica causal v1"));
    assert_eq!(lines.next(), Some("index,t,member,interior,margin,tau,f_gw"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let t: f64 = cols[1].parse().unwrap();
        let tau: f64 = cols[5].parse().unwrap();
        let expect = t.ln() - (TAU - t).ln();
        assert!((tau - expect).abs() < 1e-9, "t = {t}: {tau} vs {expect}");
        rows += 1;
    }
    assert_eq!(rows, 41);
}

#[test]
fn random_curve_has_increasing_tau() {
    let r = json(&["--seed", "11", "causal", "--steps", "30"]);
    assert_eq!(r["tau_increasing"], true);
    assert_eq!(r["f_gw_monotone"], true);
}

#[test]
fn hyperbolic_curve_violates_at_first_sample() {
    let r = json(&["causal", "--curve", "hyperbolic", "--steps", "5"]);
    assert_eq!(r["kind"], "violating");
    assert_eq!(r["first_violation"], 0);
}

#[test]
fn exit_time_of_nilpotent_direction() {
    let r = json(&["--group", "sl2", "exit-time", "--angles", "1", "--direction", "0,1;0,0"]);
    let t = r["exit_time"].as_f64().unwrap();
    assert!((t - 2.0).abs() < 1e-6, "{t}");
}

#[test]
fn cone_membership_of_torus_element() {
    let r = json(&["cone", "--angles", "1/2,1/4"]);
    assert_eq!(r["cone"]["member"], true);
    let r = json(&["cone", "--angles", "1/2,-1/4"]);
    assert_eq!(r["cone"]["member"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(elliptica(&["classify", "--angles", "1/2"]).status.code(), Some(1));
    assert_eq!(elliptica(&["classify", "--angles", "1/2,1/0"]).status.code(), Some(1));
    assert_eq!(elliptica(&["--tol-profile", "nope", "classify", "--angles", "1/2,1/4"]).status.code(), Some(1));
    let near_wall = elliptica(&["classify", "--angles", "1/2,0.00000001"]);
    assert_eq!(near_wall.status.code(), Some(2), "{}", String::from_utf8_lossy(&near_wall.stderr));
    assert_eq!(elliptica(&["tau", "--angles", "3/2,1/4"]).status.code(), Some(1));
}

#[test]
fn reports_are_deterministic_and_verify() {
    let args = ["--json", "classify", "--random", "elliptic", "--seed", "4"];
    let a = elliptica(&args);
    let b = elliptica(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let path = temp_path("report.json");
    std::fs::write(&path, &a.stdout).unwrap();
    let ok = elliptica(&["classify", "--verify", path.to_str().unwrap()]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));

    let mut report: Value = serde_json::from_slice(&a.stdout).unwrap();
    report["alcove"] = serde_json::json!([5, 5, 5]);
    std::fs::write(&path, serde_json::to_vec_pretty(&report).unwrap()).unwrap();
    let bad = elliptica(&["classify", "--verify", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert!(!bad.status.success());
}

#[test]
fn selftest_passes_and_tampered_tolerance_fails() {
    let log = temp_path("selftest.jsonl");
    let ok = elliptica(&["selftest", "--only", "5", "--log", log.to_str().unwrap()]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));
    let entry: Value = serde_json::from_str(std::fs::read_to_string(&log).unwrap().lines().next().unwrap()).unwrap();
    std::fs::remove_file(&log).ok();
    assert_eq!(entry["passed"], true);

    let bad = elliptica(&["--tol-profile", "scale:1e6", "selftest", "--only", "5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
}
