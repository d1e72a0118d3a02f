use serde_json::Value;
use std::process::{Command, Output};
use zetakit_cli::report::{validate, SCHEMA};

fn zetakit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetakit"))
        .args(args)
        .env_remove("ZETAKIT_ZERO_CACHE")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn zeros_csv_lists_known_ordinates() {
    let out = zetakit(&["zeros", "--count", "100", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,gamma");
    assert_eq!(lines.len(), 101);
    assert!(lines[1].starts_with("1,14.134725141"));
    assert!(lines[100].starts_with("100,236.524229"));
}

#[test]
fn reports_follow_the_schema() {
    let out = zetakit(&["vonmangoldt", "--count", "200"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    validate(&v).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    assert_eq!(v["command"], "vonmangoldt");
    assert_eq!(v["config"]["tolerances"]["residual"], 0.02);
    assert!(v["data"]["table"].as_array().unwrap().len() >= 2);

    let schema = zetakit(&["schema"]);
    assert!(schema.status.success());
    let text = String::from_utf8(schema.stdout).unwrap();
    assert!(text.starts_with(SCHEMA));
    for field in ["config", "versions", "checks", "data"] {
        assert!(text.contains(field));
    }
}

#[test]
fn validate_rejects_tampered_reports() {
    let out = zetakit(&["vonmangoldt", "--count", "100", "--tol", "residual=1"]);
    let mut v = json(&out);
    validate(&v).unwrap();
    v["pass"] = Value::Bool(false);
    assert!(validate(&v).is_err());
    v["pass"] = Value::Bool(true);
    v.as_object_mut().unwrap().remove("versions");
    assert!(validate(&v).is_err());
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = zetakit(&[
            "nb",
            "--lambda",
            "0.5",
            "--per-octave",
            "4",
            "--count",
            "50",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        runs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn nb_csv_has_one_row_per_lambda() {
    let out = zetakit(&[
        "nb",
        "--lambda",
        "0.5",
        "--lambda",
        "0.35",
        "--per-octave",
        "4",
        "--count",
        "50",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda,n,D2,logscaled,zerosum,cond");
    assert_eq!(lines.len(), 3);
    let d2 = |l: &str| l.split(',').nth(2).unwrap().parse::<f64>().unwrap();
    assert!(d2(lines[2]) <= d2(lines[1]));
}

#[test]
fn config_errors_exit_2() {
    let out = zetakit(&["vonmangoldt", "--count", "100", "--tol", "bogus=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown tolerance"));
    assert_eq!(
        zetakit(&["vonmangoldt", "--tol", "residual"]).status.code(),
        Some(2)
    );
    assert_eq!(
        zetakit(&["vonmangoldt", "--tol", "residual=-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        zetakit(&["vonmangoldt", "--x", "8", "--count", "50"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        zetakit(&["copoisson", "--format", "csv"]).status.code(),
        Some(2)
    );
    assert_eq!(
        zetakit(&["copoisson", "--lambda", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        zetakit(&["explicit", "--function", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn tolerance_failure_exits_1() {
    let out = zetakit(&["vonmangoldt", "--count", "100", "--tol", "residual=1e-12"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    validate(&v).unwrap();
    assert_eq!(v["pass"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL residual"));
}

#[test]
fn write_config_echoes_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = zetakit(&[
        "vonmangoldt",
        "--count",
        "100",
        "--tol",
        "residual=0.5",
        "--write-config",
        cfg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    assert_eq!(written["tolerances"]["residual"], 0.5);
    assert_eq!(written, json(&out)["config"]);
}
