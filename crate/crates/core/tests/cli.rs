use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudopass")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["tool", "version", "subcommand", "inputs", "results", "warnings"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    v
}

#[test]
fn verify_derivative_is_not_falsified_and_causal() {
    let v = report(&["verify", &data("derivative.json")]);
    assert_eq!(v["results"]["verdict"], "not-falsified");
    assert_eq!(v["results"]["causality"]["causal"], true);
}

#[test]
fn verify_negative_identity_is_falsified_with_exit_zero() {
    let v = report(&["verify", &data("neg_identity.json"), "--corpus", "bumps"]);
    assert_eq!(v["results"]["verdict"], "falsified");
    assert!(v["results"]["witness"]["residual"].as_f64().unwrap() < 0.0);
}

#[test]
fn verify_boundary_params_hold() {
    let v = report(&["verify", &data("neg_identity.json"), "--params", &data("boundary.json"), "--corpus", "bumps"]);
    assert_eq!(v["results"]["verdict"], "not-falsified");
}

#[test]
fn verify_advance_is_not_causal() {
    let v = report(&["verify", &data("advance.json"), "--corpus", "bumps"]);
    assert_eq!(v["results"]["causality"]["causal"], false);
    assert_eq!(v["results"]["support_lower_bound"].as_f64(), Some(-1.0));
}

#[test]
fn classify_descriptions() {
    let cases: [(&[&str], &str); 3] = [
        (&["--adm", "-1", "-1"], "full-plane (case i)"),
        (&["--adm", "0", "0"], "half-plane Re ≥ 0 (case iii)"),
        (&["--scat", "0", "0"], "disk center 0 radius 1 (case v)"),
    ];
    for (args, expected) in cases {
        let mut argv = vec!["classify"];
        argv.extend_from_slice(args);
        let v = report(&argv);
        assert_eq!(v["results"]["description"], expected);
    }
}

#[test]
fn sweep_writes_residual_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let v = report(&["sweep", &data("exp_decay.json"), "--grid", "0.1,1,3,-1,1,3", "--out", out.to_str().unwrap()]);
    assert!(v["results"]["min_residual"].as_f64().unwrap() > 0.0);
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().ends_with(",residual"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn fit_reports_oracle_agreement() {
    let v = report(&["fit", &data("unit_circle.csv"), "--kind", "scat", "--oracle", "--oracle-step", "0.02"]);
    assert_eq!(v["results"]["oracle"]["agreement"]["agree"], true);
}

#[test]
fn convert_flags_poles_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let v = report(&["convert", &data("minus_one.csv"), "--out", out.to_str().unwrap()]);
    assert!(!v["results"]["pole_warnings"].as_array().unwrap().is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn plot_emits_nine_panels() {
    let out = run(&["plot"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<clipPath").count(), 9);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["verify", "no-such-kernel.json"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["fit", &data("derivative.json")]).status.code(), Some(2));
    assert_eq!(run(&["sweep", &data("derivative.json"), "--grid", "-1,1,3,-1,1,3"]).status.code(), Some(2));
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["--report", path.to_str().unwrap(), "classify", "--scat", "-1", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let file = std::fs::read(&path).unwrap();
    let a: Value = serde_json::from_slice(&file).unwrap();
    assert_eq!(a["results"]["shape"], "half-plane");
}
