use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const TERNARY_FILE: &str = r#"{
  "name": "ternary_file",
  "hull": ["0", "1"],
  "branches": [
    {"label": "a", "domain": ["0", "1/3"], "map": {"type": "affine", "slope": "3", "offset": "0"}},
    {"label": "b", "domain": ["2/3", "1"], "map": {"type": "affine", "slope": "3", "offset": "-2"}}
  ]
}"#;

fn cantorfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantorfold"))
        .args(args)
        .env_remove("CANTORFOLD_TOL")
        .env_remove("CANTORFOLD_THREADS")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = cantorfold(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn dim_report_brackets_the_ternary_dimension() {
    let r = report(&["cantor", "dim", "--model", "ternary", "--tol", "1e-6"]);
    let d = 2f64.ln() / 3f64.ln();
    let res = &r["result"];
    assert!(res["lower"].as_f64().unwrap() <= d && d <= res["upper"].as_f64().unwrap());
    assert_eq!(r["command"], "cantor dim");
    assert_eq!(r["config"]["command"]["cantor"]["dim"]["model"], "ternary");
    assert_eq!(r["config"]["command"]["cantor"]["dim"]["tol"], 1e-6);
    assert!(r["version"].is_string());
}

#[test]
fn file_models_match_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "t.json", TERNARY_FILE);
    let from_file = report(&["cantor", "thickness", "--model", &path, "--depth", "4"]);
    let builtin = report(&["cantor", "thickness", "--model", "ternary", "--depth", "4"]);
    assert_eq!(from_file["result"], builtin["result"]);
    let v = report(&["model", "validate", "--model", &path]);
    assert!(v["result"].is_object());
}

#[test]
fn mpy_bound_example() {
    let r = report(&[
        "py",
        "mpy-bound",
        "--ds",
        "0.52",
        "--du",
        "0.52",
        "--eta",
        "0.01",
        "--beta",
        "2",
        "--tau",
        "0.01",
    ]);
    let d = r["result"]["bound"]["d"].as_f64().unwrap();
    assert!((d - 1.515).abs() < 1e-3 && d < 2.0);
    let bad = report(&[
        "py",
        "mpy-bound",
        "--ds",
        "0.61",
        "--du",
        "0.61",
        "--eta",
        "0.01",
        "--beta",
        "2",
        "--tau",
        "0.01",
    ]);
    assert_eq!(bad["result"]["bound"]["status"], "Infeasible");
}

#[test]
fn overlapping_domains_exit_2_and_name_the_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let body = TERNARY_FILE.replace(r#"["2/3", "1"]"#, r#"["1/4", "1"]"#);
    let path = write(dir.path(), "bad.json", &body);
    let out = cantorfold(&["model", "validate", "--model", &path]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(
        msg.contains("overlap") && msg.contains("'a'") && msg.contains("'b'"),
        "{msg}"
    );
}

#[test]
fn malformed_json_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "broken.json",
        "{\n  \"hull\": [\"0\", \"1\"],\n  \"branches\": [\n",
    );
    let out = cantorfold(&["cantor", "dim", "--model", &path]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("line") && msg.contains("column"), "{msg}");
    assert!(out.stdout.is_empty());
}

#[test]
fn validation_and_resource_errors_have_distinct_codes() {
    assert_eq!(
        cantorfold(&["cantor", "thickness", "--model", "ternary", "--depth", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cantorfold(&["cantor", "dim", "--model", "no_such_model"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cantorfold(&["py", "exclude", "--eps0", "1/2"])
            .status
            .code(),
        Some(2)
    );
    let out = cantorfold(&["py", "chains", "--budget", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("budget"));
    let out = cantorfold(&["py", "catalog", "--depth", "8", "--cap", "50"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn env_vars_override_defaults() {
    let out = Command::new(env!("CARGO_BIN_EXE_cantorfold"))
        .args(["cantor", "dim", "--model", "ternary"])
        .env("CANTORFOLD_TOL", "1e-3")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["config"]["command"]["cantor"]["dim"]["tol"], 1e-3);
    let flag = report(&["cantor", "dim", "--model", "ternary", "--tol", "1e-4"]);
    assert_eq!(flag["config"]["command"]["cantor"]["dim"]["tol"], 1e-4);
}

#[test]
fn out_directory_reports_are_reproducible() {
    let args = ["py", "catalog", "--depth", "6"];
    let mut runs = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap().to_owned();
        let mut full = vec!["--threads", threads, "--out", &d];
        full.extend(args);
        let out = cantorfold(&full);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(out.stdout.is_empty());
        let json = fs::read(dir.path().join("catalog.json")).unwrap();
        let csv = fs::read_to_string(dir.path().join("catalog.csv")).unwrap();
        assert!(csv.lines().any(|l| l.starts_with("word,n,")));
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 253);
        runs.push((json, csv));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn model_list_names_every_builtin() {
    let r = report(&["model", "list"]);
    let names: Vec<&str> = r["result"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["name"].as_str().unwrap())
        .collect();
    for want in [
        "ternary",
        "middle_alpha",
        "markov_golden",
        "smale_affine",
        "toy_het",
    ] {
        assert!(names.contains(&want), "{names:?}");
    }
}
