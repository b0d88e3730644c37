use std::process::{Command, Output};

use serde_json::Value;

fn lowner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowner"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("lowner-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn constants_prints_json() {
    let o = lowner(&["constants", "--h", "4", "--p", "2"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert!((v["kantorovich"].as_f64().unwrap() - 1.5625).abs() < 1e-12);
    assert!(v["specht"].as_f64().unwrap() > 1.0);
}

#[test]
fn unknown_id_exits_with_two_and_lists_registry() {
    let o = lowner(&["verify", "no-such-thm"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("counterexample-sqrt-geo"));
    assert!(o.stdout.is_empty());
}

#[test]
fn counterexample_passes_and_reports_entries() {
    let o = lowner(&["verify", "counterexample-sqrt-geo"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("1.7915"));
    assert_eq!(stdout_json(&o)["passed"], Value::Bool(true));
}

#[test]
fn exponent_filter_selects_checks() {
    let o = lowner(&["verify", "minkowski-sandwich", "--p", "2", "--trials", "50", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    for out in v["outcomes"].as_array().unwrap() {
        assert!(out["theorem"].as_str().unwrap().ends_with("/2"));
    }
    assert_eq!(lowner(&["verify", "minkowski-sandwich", "--p", "7.25"]).status.code(), Some(2));
}

#[test]
fn manifest_replays_to_the_same_report() {
    let dir = tempdir();
    let out = dir.join("report.json");
    let o = lowner(&["verify", "reverse-jensen/pinch", "--trials", "40", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let manifest = dir.join("report.json.manifest.json");
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "verify");
    assert_eq!(m["config"]["seed"], 3);

    let replayed = lowner(&["replay", manifest.to_str().unwrap()]);
    assert!(replayed.status.success());
    let strip = |mut v: Value| {
        for o in v["outcomes"].as_array_mut().unwrap() {
            o["elapsed_ms"] = Value::Null;
        }
        v
    };
    let first: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(strip(first), strip(stdout_json(&replayed)));
}

#[test]
fn scan_emits_csv() {
    let o = lowner(&["scan", "--p-grid", "0.5,2,3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["p", "regime", "convex_violations", "concave_violations", "violations", "worst_margin"]);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1][4], "0");
    assert_eq!(rows[2][4], "0");
    assert_ne!(rows[3][4], "0");
}

#[test]
fn eval_reads_matrices_and_specs() {
    let dir = tempdir();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    std::fs::write(&a, r#"{"dim": 2, "re": [[2, 1], [1, 2]]}"#).unwrap();
    std::fs::write(&b, r#"{"dim": 2, "re": [[1, 0], [0, 4]]}"#).unwrap();
    let spec = dir.join("spec.json");
    std::fs::write(&spec, r#"{"sigma": "arith:0.5"}"#).unwrap();

    let o = lowner(&["eval", "--spec", spec.to_str().unwrap(), "--functional", "trace-f2", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((stdout_json(&o)["value"].as_f64().unwrap() - 4.5).abs() < 1e-12);

    let o = lowner(&["eval", "--functional", "determinant", a.to_str().unwrap()]);
    let v = stdout_json(&o);
    assert!((v["value"]["re"][0][1].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let neg = dir.join("neg.json");
    std::fs::write(&neg, r#"{"dim": 2, "re": [[1, 0], [0, -1]]}"#).unwrap();
    let o = lowner(&["eval", "--functional", "determinant", neg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("-1"));
}
