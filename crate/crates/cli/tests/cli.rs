use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use netwave::{OptimizationResult, Rational, Schedule, SimReport};
use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/scenarios").join(name)
}

fn netwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netwave")).args(args).output().unwrap()
}

fn with_scenario(cmd: &str, name: &str, extra: &[&str]) -> Output {
    let path = scenario(name);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    netwave(&args)
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_chain() {
    let v = json(&with_scenario("analyze", "chain6.json", &[]));
    let p = &v["paths"][0];
    assert_eq!(p["report"]["interference_intensity"], 3);
    assert_eq!(p["report"]["concurrency_intensity"], 2);
    assert_eq!(p["intrinsic_period"], 3);
    assert_eq!(p["continuous"], true);
}

#[test]
fn simulate_chain() {
    let out = with_scenario("simulate", "chain6.json", &["--periods", "10"]);
    let rep: SimReport = serde_json::from_value(json(&out)).unwrap();
    assert_eq!(rep.throughput, Rational::new(1, 3));
    assert_eq!(rep.window_beats, 30);
    assert!(rep.is_clean());
}

#[test]
fn simulate_trace_lines() {
    let out = with_scenario("simulate", "chain6.json", &["--periods", "2", "--warmup", "1", "--trace"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9 + 1);
    let first: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["beat"], 1);
    let rep: SimReport = serde_json::from_str(lines[9]).unwrap();
    assert_eq!(rep.measured_periods, 2);
}

#[test]
fn matrix_and_schedule_of_far_pair() {
    let m = json(&with_scenario("matrix", "far_pair.json", &["--l1", "2", "--l2", "1"]));
    assert_eq!(m["matrix"], serde_json::json!([[1, 1, 1], [1, 1, 1], [1, 1, 1]]));
    assert_eq!(m["continuation"]["support_number"], 3);

    let s = json(&with_scenario("schedule", "far_pair.json", &[]));
    assert_eq!(s["predicted_throughput"], serde_json::json!({"num": 2, "den": 3}));
    let schedule: Schedule = serde_json::from_value(s["schedule"].clone()).unwrap();
    assert_eq!(schedule.period, 3);
    assert_eq!(serde_json::to_value(&schedule).unwrap(), s["schedule"]);

    let text = with_scenario("schedule", "far_pair.json", &["--format", "text"]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.starts_with("period 3 beats"));
    assert_eq!(text.lines().count(), 2 + 12);
}

#[test]
fn optimize_is_deterministic() {
    let a = with_scenario("optimize", "far_pair.json", &[]);
    let b = with_scenario("optimize", "far_pair.json", &[]);
    assert_eq!(a.stdout, b.stdout);
    let res: OptimizationResult = serde_json::from_value(json(&a)).unwrap();
    assert_eq!(res.best_throughput, Rational::new(2, 3));
    assert_eq!(res.search_log.len(), 1);

    let wide = with_scenario("optimize", "far_pair.json", &["--t1-range", "3:6", "--max-activations", "2"]);
    let res: OptimizationResult = serde_json::from_value(json(&wide)).unwrap();
    assert!(res.search_log.len() > 1);
    assert!(res.best_throughput >= Rational::new(2, 3));
}

#[test]
fn support_reads_grids_and_checks_candidates() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_netwave"))
        .args(["support", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"110\n010\n011\n").unwrap();
    let v = json(&child.wait_with_output().unwrap());
    assert_eq!(v["support_number"], 3);
    assert_eq!(v["support"]["elements"], serde_json::json!([[1, 1], [2, 2], [3, 3]]));

    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "[[1,1],[1,1]]").unwrap();
    let out = netwave(&["support", file.path().to_str().unwrap(), "--candidate", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"][0]["kind"], "uncovered");
}

#[test]
fn malformed_scenario_names_the_field() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"paths": [{{"id": 1, "n_senders": -2}}], "relation": {{"matrix": [[0]]}}}}"#).unwrap();
    let out = netwave(&["analyze", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("paths[0].n_senders"), "{err}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(netwave(&["analyze", "--bogus"]).status.code(), Some(2));
    assert_eq!(netwave(&["frobnicate"]).status.code(), Some(2));
    let path = scenario("far_pair.json");
    let out = netwave(&["schedule", path.to_str().unwrap(), "--activations", "2", "--l1", "1", "--l2", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_prints_one_line_per_check() {
    let out = netwave(&["verify", "--seed", "42", "--instances", "40"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    let failing: Vec<&&str> = lines.iter().filter(|l| l.starts_with("[FAIL]")).collect();
    for l in &failing {
        assert!(l.contains("no pipelined arrangement exists"), "{l}");
    }
    assert_eq!(out.status.success(), failing.is_empty());
}
