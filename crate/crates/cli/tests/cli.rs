use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_team-order"))
        .args(args)
        .env_remove("TEAM_ORDER_BRUTE_CAP")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn win(v: &Value) -> f64 {
    v["report"]["win_probability"].as_f64().unwrap()
}

#[test]
fn evaluate_table1() {
    let v = json_of(&run(&["evaluate", &path("table1.json"), "--lineup", "1,2,3"]));
    assert!((win(&v) - 0.972).abs() < 1e-12);
    let dist = v["report"]["distribution"].as_array().unwrap();
    assert_eq!(dist.len(), 4);

    let v = json_of(&run(&["evaluate", &path("table1.json"), "--lineup", "2,3,1"]));
    assert_eq!(win(&v), 1.0);
}

#[test]
fn evaluate_rejects_non_permutation() {
    let out = run(&["evaluate", &path("table1.json"), "--lineup", "1,1,2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("permutation"));
}

#[test]
fn solve_table2() {
    let v = json_of(&run(&["solve", &path("table2.json"), "--method", "max-weight"]));
    assert_eq!(win(&v), 0.0);
    let v = json_of(&run(&["solve", &path("table2.json"), "--method", "brute"]));
    assert!((win(&v) - 0.0625).abs() < 1e-12);
    assert_eq!(v["method"], "brute");
}

#[test]
fn three_value_agrees_with_brute() {
    let a = json_of(&run(&["solve", &path("three_value.json"), "--method", "three-value"]));
    let b = json_of(&run(&["solve", &path("three_value.json"), "--method", "brute"]));
    assert!((win(&a) - win(&b)).abs() < 1e-10);
}

#[test]
fn ptas_reports_diagnostics() {
    let v = json_of(&run(&["solve", &path("table3.json"), "--method", "ptas", "--epsilon", "1"]));
    assert_eq!(v["diagnostics"]["kind"], "ptas");
    assert_eq!(v["diagnostics"]["variance_threshold"], 16.0);
    assert!((win(&v) - 0.91).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let out = run(&["solve", &path("table1.json"), "--method", "three-value"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["solve", &path("table1.json"), "--method", "brute", "--brute-cap", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap 2"));

    let out = Command::new(env!("CARGO_BIN_EXE_team-order"))
        .args(["solve", &path("table1.json")])
        .env("TEAM_ORDER_BRUTE_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["evaluate", "/nonexistent.json", "--lineup", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bound_outputs() {
    let v = json_of(&run(&["bound", &path("table1.json")]));
    assert!(v["bound"].as_f64().unwrap() >= 0.028);
    assert!((v["audit"]["true_gap"].as_f64().unwrap() - 0.028).abs() < 1e-12);
    assert_eq!(v["audit"]["holds"], true);

    let v = json_of(&run(&["bound", &path("homogeneous.json")]));
    assert_eq!(v["bound"], 0.0);
    assert_eq!(v["regime"], "part2-central");
}

#[test]
fn hitting_set_answers_agree() {
    for (file, expected) in [("hitting_set_yes.json", true), ("hitting_set_no.json", false)] {
        let v = json_of(&run(&["hitting-set", &path(file)]));
        assert_eq!(v["direct_answer"], expected);
        assert_eq!(v["reduced_answer"], expected);
    }
}

#[test]
fn equilibrium_is_flat() {
    let v = json_of(&run(&["equilibrium", &path("table1.json")]));
    assert!(v["second_spread"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["second_values"].as_array().unwrap().len(), 6);
}

#[test]
fn bench_is_deterministic_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&[
            "bench",
            "--suite",
            "oracle-equivalence",
            "--count",
            "12",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        assert!(String::from_utf8_lossy(&o.stderr).contains("passed=12/12"));
    }
    let strip_times = |p: &PathBuf| -> Vec<Vec<String>> {
        let mut rdr = csv::Reader::from_path(p).unwrap();
        let headers = rdr.headers().unwrap().clone();
        rdr.records()
            .map(|r| {
                let r = r.unwrap();
                headers
                    .iter()
                    .zip(r.iter())
                    .filter(|(h, _)| !h.ends_with("_ms"))
                    .map(|(_, v)| v.to_string())
                    .collect()
            })
            .collect()
    };
    let (ra, rb) = (strip_times(&a), strip_times(&b));
    assert_eq!(ra.len(), 12);
    assert_eq!(ra, rb);
}

#[test]
fn bench_jsonl_to_stdout() {
    let out = run(&["bench", "--suite", "equilibrium", "--count", "3"]);
    assert!(out.status.success());
    let lines: Vec<Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|r| r["pass"] == true));
    assert_eq!(lines[2]["index"], 2);
}

#[test]
fn generate_round_trips_through_evaluate() {
    let out = run(&["generate", "-n", "4", "--seed", "3"]);
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    std::fs::write(&file, &out.stdout).unwrap();
    let v = json_of(&run(&["evaluate", file.to_str().unwrap(), "--lineup", "4,3,2,1"]));
    assert_eq!(v["report"]["target"], 3);
}
