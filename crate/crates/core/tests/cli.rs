use std::process::Command;

use serde_json::Value;

fn records(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_records")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn extract_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("seq.csv");
    std::fs::write(&input, "3,1,4,1,5\n").unwrap();
    let path = input.to_str().unwrap();
    let (code, out, _) = records(&["extract", "--kind", "strong-upper", "--input", path]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let events: Vec<(u64, f64)> = v["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["t"].as_u64().unwrap(), e["value"].as_f64().unwrap()))
        .collect();
    assert_eq!(events, vec![(1, 3.0), (3, 4.0), (5, 5.0)]);
    assert_eq!(v["kind"], "strong-upper");

    let output = dir.path().join("out.csv");
    let (code, _, _) = records(&[
        "extract",
        "--kind",
        "weak-lower",
        "--input",
        path,
        "--format",
        "csv",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(output).unwrap(), "n,t,value\n1,1,3\n2,2,1\n3,4,1\n");
}

#[test]
fn extract_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(&input, "1,x\n").unwrap();
    assert_eq!(records(&["extract", "--input", input.to_str().unwrap()]).0, 2);
    assert_eq!(records(&["extract", "--input", "/nonexistent/file"]).0, 2);
    assert_eq!(records(&["extract", "--kind", "sideways", "--input", input.to_str().unwrap()]).0, 2);
}

#[test]
fn law_example() {
    let (code, out, _) = records(&["law", "--formula", "interRecords", "--k", "1"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["value"].as_f64(), Some(0.5));
}

#[test]
fn simulate_requires_seed() {
    let (code, _, err) = records(&["simulate", "--dist", "exp:1", "--statistic", "record-count"]);
    assert_eq!(code, 2);
    assert!(err.contains("--seed"));
    let (code, out, _) = records(&[
        "simulate",
        "--dist",
        "dunif:4",
        "--statistic",
        "no-further-record",
        "--trials",
        "4000",
        "--horizon",
        "200",
        "--seed",
        "1",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["estimate"].as_f64().unwrap() - 0.25).abs() < 4.0 * v["stderr"].as_f64().unwrap());
}

#[test]
fn verify_output_is_reproducible() {
    let args = ["verify", "--suite", "core", "--seed", "7", "--check", "3,8,9,11"];
    let (c1, a, _) = records(&args);
    let (c2, b, _) = records(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
    assert_eq!(v["pass"], true);
}

#[test]
fn table_output() {
    let (code, out, _) = records(&["table", "--name", "gaps"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("k,law,oracle_strong,oracle_lower,oracle_upper,truncation\n"));
    assert_eq!(out.lines().count(), 11);
    assert_eq!(records(&["table", "--name", "nope"]).0, 2);
}
