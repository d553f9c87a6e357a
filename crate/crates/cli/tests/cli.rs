use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ancient-flow"))
}

fn run(args: &[&str], out: &Path) -> i32 {
    let status = bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .status()
        .expect("binary runs");
    status.code().expect("exit code")
}

fn csv_column(path: &Path, column: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == column).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_owned()).collect()
}

fn floats(path: &Path, column: &str) -> Vec<f64> {
    csv_column(path, column).iter().map(|v| v.parse().unwrap()).collect()
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(files(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn assert_same_tree(a: &Path, b: &Path) {
    let (fa, fb) = (files(a), files(b));
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.strip_prefix(a).unwrap(), y.strip_prefix(b).unwrap());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{} differs", x.display());
    }
}

#[test]
fn torus_curve_on_the_sphere() {
    let dir = TempDir::new().unwrap();
    let code = run(&["torus", "--freqs", "1,2", "--t", "-1", "--grid", "512"], dir.path());
    assert_eq!(code, 0);
    let curve: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("curve.json")).unwrap()).unwrap();
    assert!((curve["metadata"]["r"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let points = curve["points"].as_array().unwrap();
    assert_eq!(points.len(), 512);
    for p in points {
        let n: f64 = p.as_array().unwrap().iter().map(|v| v.as_f64().unwrap().powi(2)).sum();
        assert!((n - 2.0).abs() < 1e-12);
    }
}

#[test]
fn single_frequency_radius_column() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["torus", "--freqs", "1"], dir.path()), 0);
    let ts = floats(&dir.path().join("radius.csv"), "t");
    let rs = floats(&dir.path().join("radius.csv"), "r");
    assert_eq!(ts.len(), 20);
    for (t, r) in ts.iter().zip(&rs) {
        assert!((r - (-2.0 * t).sqrt()).abs() <= 1e-8 * r.max(1.0));
    }
}

#[test]
fn spectrum_of_the_two_circle() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["spectrum", "--multiplicity", "2", "--count", "6"], dir.path()), 0);
    let values = floats(&dir.path().join("spectrum.csv"), "eigenvalue");
    let expected = [0.0, 0.125, 0.125, 0.5, 0.5, 1.125, 1.125];
    assert_eq!(values.len(), expected.len());
    for (v, e) in values.iter().zip(expected) {
        assert!((v - e).abs() < 5e-4, "{v} vs {e}");
    }
}

#[test]
fn carleman_example_holds() {
    let dir = TempDir::new().unwrap();
    let args = ["verify", "carleman", "--sigma-mult", "2", "--alpha", "4", "--delta", "1", "--caloric-mode", "1"];
    assert_eq!(run(&args, dir.path()), 0);
    assert_eq!(csv_column(&dir.path().join("verdicts.csv"), "holds"), vec!["true"]);
}

#[test]
fn codimension_examples() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["codim", "--torus", "1,2", "--t", "-1", "--expect", "3"], dir.path()), 0);
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["codim", "--torus", "1,2", "--t", "-5e-5", "--r-from-t", "--expect", "1"], dir.path()), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("codim.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["codimension"], 1);
}

#[test]
fn failed_check_exits_with_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["codim", "--torus", "1,2", "--t", "-1", "--expect", "2"], dir.path()), 1);
    assert_eq!(csv_column(&dir.path().join("verdicts.csv"), "holds"), vec!["false"]);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["spectrum", "--bogus", "3"], dir.path()), 2);
    assert_eq!(run(&["torus"], dir.path()), 2);
    assert_eq!(run(&["torus", "--freqs", "2,1"], dir.path()), 2);
    assert_eq!(run(&["flow", "--torus", "1,2", "--circle-mult", "2"], dir.path()), 2);
    assert_eq!(run(&["verify", "growth", "--samples", "3"], dir.path()), 2);
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"params": {"freqs": [1, 2], "colour": 3}}"#).unwrap();
    assert_eq!(run(&["torus", "--config", config.to_str().unwrap()], dir.path()), 2);
    fs::write(&config, r#"{"grids": 3}"#).unwrap();
    assert_eq!(run(&["torus", "--freqs", "1", "--config", config.to_str().unwrap()], dir.path()), 2);
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"grid": 64, "params": {"freqs": [1, 3], "t": -2.0}}"#).unwrap();
    let out = dir.path().join("run");
    assert_eq!(run(&["torus", "--config", config.to_str().unwrap(), "--t", "-1"], &out), 0);
    let inputs: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("inputs.json")).unwrap()).unwrap();
    assert_eq!(inputs["grid"], 64);
    assert_eq!(inputs["params"]["freqs"], serde_json::json!([1, 3]));
    assert_eq!(inputs["params"]["t"], -1.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: [&[&str]; 4] = [
        &["verify", "poincare", "--instances", "5", "--seed", "11"],
        &["caloric", "--torus", "1,2", "--fields", "3", "--cadence", "50", "--seed", "11"],
        &["entropy", "--torus", "1,2", "--t", "-1", "--grid", "128", "--seed", "11"],
        &["rescaled", "--circle-mult", "2", "--reference-mult", "2", "--tau1", "0.2"],
    ];
    for args in cases {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        assert_eq!(run(args, a.path()), 0, "{args:?}");
        assert_eq!(run(args, b.path()), 0, "{args:?}");
        assert_same_tree(a.path(), b.path());
    }
}

#[test]
fn seeds_change_random_suites() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    run(&["verify", "rayleigh", "--instances", "3", "--seed", "1"], a.path());
    run(&["verify", "rayleigh", "--instances", "3", "--seed", "2"], b.path());
    assert_ne!(
        fs::read(a.path().join("rayleigh.csv")).unwrap(),
        fs::read(b.path().join("rayleigh.csv")).unwrap()
    );
}

#[test]
fn verdict_rows_carry_digest_and_claim() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["verify", "growth", "--expect", "0.25"], dir.path()), 0);
    let digests = csv_column(&dir.path().join("verdicts.csv"), "inputs_digest");
    assert_eq!(digests.len(), 1);
    assert_eq!(digests[0].len(), 64);
    assert!(!csv_column(&dir.path().join("verdicts.csv"), "claim")[0].is_empty());
}
