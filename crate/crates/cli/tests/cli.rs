use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hblab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hblab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = hblab(args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("valid JSON")
}

fn golden(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

fn error_kind(o: &Output) -> String {
    let v: Value = serde_json::from_slice(&o.stderr).expect("JSON error on stderr");
    v["error"].as_str().unwrap().to_string()
}

#[test]
fn classify_linear_symbol() {
    let v = json(&["classify", "--b", "(1+z)/2", "--f", "1+z"]);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["inputs"]["b"], "(1+z)/2");
    assert_eq!(v["result"]["verdict"], "cyclic");
    let v = json(&["classify", "--b", "(1+z)/2", "--f", "1-z"]);
    assert_eq!(v["result"]["verdict"], "not_cyclic");
    let v = json(&["classify", "--b", "(1+z)/2", "--f", "z"]);
    assert_eq!(v["result"]["verdict"], "not_cyclic");
}

#[test]
fn full_analysis_flags_atom_zero() {
    let v = json(&["classify", "--full", "--b", "z(1+z)/2", "--f", "1-z"]);
    assert_eq!(v["result"]["verdict"], "not_cyclic");
    let rules: Vec<&str> = v["result"]["evidence"].as_array().unwrap().iter().map(|e| e["rule"].as_str().unwrap()).collect();
    assert!(rules.contains(&"clark_atom_necessity"));
    assert!(v["result"]["decay"]["entries"].as_array().unwrap().len() == 60);
}

#[test]
fn decay_constant_column() {
    let out = ok(&["decay", "--b", "(1+z)/2", "--f", "1-z", "--n", "12"]);
    let rows: Vec<&str> = out.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 12);
    for r in rows {
        let d2: f64 = r.split(',').nth(1).unwrap().parse().unwrap();
        assert!((d2 - 2.0).abs() < 1e-9, "{r}");
    }
    assert_eq!(out, golden("decay_one_minus_z.csv"));
}

#[test]
fn exact_decay_matches_golden() {
    let out = ok(&["--exact", "decay", "--b", "(1+z)/2", "--f", "1+z", "--n", "8"]);
    assert_eq!(out, golden("decay_exact_one_plus_z.csv"));
}

#[test]
fn clark_atom_of_shifted_symbol() {
    let out = ok(&["clark", "--b", "z(1+z)/2", "--alpha", "0"]);
    let atoms: Vec<Vec<&str>> = out.lines().filter(|l| l.contains(",atom,")).map(|l| l.split(',').collect()).collect();
    assert_eq!(atoms.len(), 1);
    let theta: f64 = atoms[0][2].parse().unwrap();
    let mass: f64 = atoms[0][3].parse().unwrap();
    assert!(theta.abs() < 1e-9);
    assert!((mass - 2.0 / 3.0).abs() < 1e-6, "{mass}");
}

#[test]
fn clark_alpha_accepts_pi_suffix() {
    let out = ok(&["clark", "--b", "z/2", "--alpha", "-0.5pi", "--samples", "4"]);
    let first: f64 = out.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((first - 1.5 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn mate_matches_golden() {
    assert_eq!(ok(&["mate", "--b", "(1+z)/2"]), golden("mate_linear.json"));
}

#[test]
fn norm_float_and_exact_agree() {
    let f = json(&["norm", "--b", "(1+z)/2", "--f", "1+z"]);
    let e = json(&["--exact", "norm", "--b", "(1+z)/2", "--f", "1+z"]);
    assert_eq!(e["result"]["norm_sq_exact"], "12");
    assert!((f["result"]["norm_sq"].as_f64().unwrap() - 12.0).abs() < 1e-9);
}

#[test]
fn validate_and_sigma() {
    let v = json(&["validate", "--b", "z/2"]);
    assert_eq!(v["result"]["non_extreme"], true);
    let v = json(&["sigma", "--b", "(1+z)/2"]);
    let upper = v["result"]["upper"].as_array().unwrap();
    assert_eq!(upper.len(), 1);
    assert!(upper[0]["theta"].as_f64().unwrap().abs() < 1e-9);
    let csv = ok(&["sigma", "--phi", "1+z", "--sections", "4,8"]);
    assert_eq!(csv.lines().next(), Some("N,k,sigma_k"));
    assert_eq!(csv.lines().count(), 1 + 4 + 8);
}

#[test]
fn certificates() {
    let a = json(&[
        "certify", "--rule", "A", "--b", "(1+z)/2", "--f", "1+z", "--e-arcs", "0.1:-0.1", "--f-arcs", "-0.5:0.5",
    ]);
    assert_eq!(a["result"]["report"]["verdict"], "cyclic");
    let b = json(&["certify", "--rule", "B", "--b", "z/2", "--f", "2+z"]);
    assert_eq!(b["result"]["report"]["verdict"], "cyclic");
    let c = json(&["certify", "--rule", "C", "--b", "z/2", "--g", "1"]);
    assert_eq!(c["result"]["report"]["verdict"], "cyclic");
    assert_eq!(c["result"]["outer_part"]["num"][0][0], 1.0);
}

#[test]
fn certificate_failure_is_domain_error() {
    let o = hblab(&["certify", "--rule", "A", "--b", "(1+z)/2", "--f", "1+z", "--e-arcs", "full"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "certificate_failed");
    assert!(o.stdout.is_empty());
}

#[test]
fn models() {
    let d = json(&["dirichlet", "--atoms", "0:1", "--f", "1+z"]);
    assert_eq!(d["result"]["report"]["verdict"], "cyclic");
    let d = json(&["--exact", "dirichlet", "--atoms", "0:1,pi:1", "--f", "1-z^2"]);
    assert_eq!(d["result"]["report"]["verdict"], "not_cyclic");
    assert!(d["result"]["norm_exact"]["total"].is_string());
    let t = json(&["theta", "--theta", "z^2", "--f", "2+z"]);
    assert_eq!(t["result"]["report"]["verdict"], "cyclic");
    let t = json(&["theta", "--theta", "z^2", "--f", "1-z"]);
    assert_eq!(t["result"]["report"]["verdict"], "not_cyclic");
    let u = json(&["universal", "--b", "z(1+z)/2"]);
    assert_eq!(u["result"]["b_outer"], false);
    assert_eq!(u["result"]["b_consistent"], true);
}

#[test]
fn deterministic_output() {
    let args = ["classify", "--full", "--b", "(1+z)/2", "--f", "1+z"];
    assert_eq!(ok(&args), ok(&args));
    let seq: Vec<&str> = std::iter::once("--sequential").chain(args).collect();
    assert_eq!(ok(&args), ok(&seq));
}

#[test]
fn thread_cap_from_environment() {
    let args = ["decay", "--b", "(1+z)/2", "--f", "1+z", "--n", "30"];
    let capped = Command::new(env!("CARGO_BIN_EXE_hblab")).env("HB_LAB_THREADS", "1").args(args).output().unwrap();
    assert!(capped.status.success());
    assert_eq!(stdout(&capped), ok(&args));
    let bad = Command::new(env!("CARGO_BIN_EXE_hblab")).env("HB_LAB_THREADS", "zero").args(args).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    // Unknown subcommand and missing arguments are usage errors.
    assert_eq!(hblab(&["bogus"]).status.code(), Some(2));
    assert_eq!(hblab(&["classify", "--b", "z/2"]).status.code(), Some(2));
    // Malformed literals are usage errors too.
    let o = hblab(&["classify", "--b", "(1+z", "--f", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "usage");
    assert_eq!(hblab(&["clark", "--b", "z/2", "--alpha", "pix"]).status.code(), Some(2));
    assert_eq!(hblab(&["--tol", "-1", "validate", "--b", "z/2"]).status.code(), Some(2));
    // Mathematical rejections are domain errors.
    let o = hblab(&["validate", "--b", "2*z"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "not_contractive");
    assert_eq!(error_kind(&hblab(&["validate", "--b", "z"])), "non_extreme_violation");
    let o = hblab(&["decay", "--b", "(1+z)/2", "--f", "0", "--n", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_passes() {
    let out = ok(&["verify"]);
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 15);
    assert!(!out.contains("FAIL"));
}
