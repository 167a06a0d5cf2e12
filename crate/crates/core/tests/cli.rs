mod common;

use std::process::Command;

use jetvar::frontend::cli::{run, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};

use common::model_path;

fn jetvar(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("jetvar").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn path(name: &str) -> String {
    model_path(name).to_string_lossy().into_owned()
}

#[test]
fn derive_prints_equations() {
    let (code, out, _) = jetvar(&["derive", &path("oscillator")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "-y_tt - omega^2*y = 0\n");
    let (code, out, _) = jetvar(&["deviate", &path("oscillator"), "--format", "latex"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 2);
    assert!(out.contains("\\omega"));
}

#[test]
fn check_reports_pass() {
    let (code, out, _) = jetvar(&["check", &path("sphere"), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["pairs"].as_array().unwrap().len(), 4);
}

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let (code, out, err) = jetvar(&[
        "simulate",
        &path("oscillator"),
        "--init",
        "y=0,y_t=1",
        "--jacobi-init",
        "v_y=1,v_y_t=0",
        "--t1",
        "soon",
    ]);
    assert_eq!(code, EXIT_USAGE, "{out}{err}");

    let (code, out, err) = jetvar(&[
        "simulate",
        &path("oscillator"),
        "--init",
        "y=0,y_t=1",
        "--jacobi-init",
        "v_y=1,v_y_t=0",
        "--t1",
        "1",
        "--dt",
        "0.01",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.starts_with("101 rows"), "{out}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,y,y_t,v_y,v_y_t"));
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((last[0] - 1.0).abs() < 1e-15);
    assert!((last[1] - 1f64.sin()).abs() < 1e-9);
    assert!((last[3] - 1f64.cos()).abs() < 1e-9);
}

#[test]
fn jacobi_init_defaults_to_zero() {
    let (code, out, err) = jetvar(&[
        "simulate",
        &path("pendulum"),
        "--init",
        "y=1,y_t=0",
        "--t1",
        "0.01",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let last = out.lines().last().unwrap();
    let values: Vec<f64> = last.split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(&values[3..], &[0.0, 0.0]);
}

#[test]
fn residual_reports_exponent() {
    let (code, out, err) = jetvar(&[
        "residual",
        &path("riccati"),
        "--init",
        "y=0",
        "--jacobi-init",
        "v_y=1",
        "--t1",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
    let p = doc["exponent"].as_f64().unwrap();
    assert!((1.9..=2.1).contains(&p), "{p}");
    assert_eq!(doc["norm"], "max-over-grid");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.eqn");
    std::fs::write(&bad, "base t\nfibre y\nlagrangian y_t^2 + q").unwrap();
    let bad = bad.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec![],
        vec!["frobnicate"],
        vec!["derive", "/nonexistent/model.eqn"],
        vec!["derive", bad],
        vec!["check", bad],
    ];
    for args in cases {
        let (code, _, err) = jetvar(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (_, _, err) = jetvar(&["derive", bad]);
    assert!(err.contains("line 3") && err.contains("`q`"), "{err}");

    let oscillator = path("oscillator");
    let numeric_usage: Vec<Vec<&str>> = vec![
        vec!["simulate", &oscillator, "--init", "y=0", "--t1", "1"],
        vec![
            "simulate",
            &oscillator,
            "--init",
            "y=0,y_t=1,z=2",
            "--t1",
            "1",
        ],
        vec![
            "simulate",
            &oscillator,
            "--init",
            "y=0,y_t=1",
            "--t1",
            "1",
            "--dt",
            "0",
        ],
        vec!["simulate", &oscillator, "--init", "y=0,y_t=1", "--t1", "-1"],
        vec![
            "residual",
            &oscillator,
            "--init",
            "y=0,y_t=1",
            "--t1",
            "1",
            "--eps",
            "-0.1",
        ],
    ];
    for args in numeric_usage {
        assert_eq!(jetvar(&args).0, EXIT_USAGE, "{args:?}");
    }
}

#[test]
fn blow_up_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("blowup.eqn");
    std::fs::write(&file, "base t\nfibre y\nequation y_t - y^2").unwrap();
    let (code, _, err) = jetvar(&[
        "simulate",
        file.to_str().unwrap(),
        "--init",
        "y=1",
        "--t1",
        "2",
    ]);
    assert_eq!(code, EXIT_NUMERIC);
    assert!(err.contains("numeric failure"), "{err}");

    let (code, _, err) = jetvar(&["simulate", &path("laplace"), "--init", "u=0", "--t1", "1"]);
    assert_eq!(code, EXIT_NUMERIC, "{err}");
}

#[test]
fn binary_exit_codes_and_determinism() {
    let bin = env!("CARGO_BIN_EXE_jetvar");
    let output = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let check = ["check", &path("kepler"), "--seed", "3", "--format", "json"];
    let (a, b) = (output(&check), output(&check));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(output(&["derive"]).status.code(), Some(2));
    assert_eq!(output(&["--help"]).status.code(), Some(0));
}
