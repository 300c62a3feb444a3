use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, None)
}

fn run_env(args: &[&str], caps: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_loopforge"));
    cmd.args(args).env_remove("LOOPFORGE_CAPS");
    if let Some(c) = caps {
        cmd.env("LOOPFORGE_CAPS", c);
    }
    cmd.output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn degree_of_commutator() {
    let v = json(&["degree", "((x1*x2)\\(x2*x1))"]);
    assert_eq!(v["dimension_degree"], 2);
    assert_eq!(v["total"], 0);
}

#[test]
fn eval_prints_series() {
    let o = run(&["--order", "2", "eval", "(x1*x2)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("1 - u1 - u2"), "{}", stdout(&o));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "--formula", "1", "--p", "1", "--q", "2"]).status.code(), Some(0));
    let bad = run(&["verify", "--formula", "1", "--p", "1", "--q", "1", "--flip-sign"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL"));
    let v = json(&["verify", "--formula", "5", "--p", "2"]);
    assert_eq!(v["pass"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["eval", "(x1*"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--formula", "9", "--p", "1", "--q", "1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "/nonexistent/table.tbl"]).status.code(), Some(2));
}

#[test]
fn caps_come_from_environment() {
    assert_eq!(run_env(&["--order", "5", "eval", "x1"], Some("order=3")).status.code(), Some(2));
    assert_eq!(run_env(&["--order", "9", "eval", "x1"], Some("order=9")).status.code(), Some(0));
    assert_eq!(run_env(&["eval", "x1"], Some("bogus=1")).status.code(), Some(2));
}

#[test]
fn analyze_bundled_and_file_loops() {
    let v = json(&["analyze", "moufang16"]);
    assert_eq!(v["bruck_in_gamma"], true);
    assert_eq!(v["bruck_class"], 2);

    let dir = std::env::temp_dir().join(format!("loopforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("z3.tbl");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "3\n0 1 2\n1 2 0\n2 0 1").unwrap();
    let v = json(&["analyze", path.to_str().unwrap()]);
    assert_eq!(v["gamma"][1], serde_json::json!([0]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn decompose_and_check() {
    let o = run(&["decompose", "--p", "2", "--q", "1", "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified"));
}

#[test]
fn graded_suites() {
    assert_eq!(json(&["akivis"])["pass"], true);
    let v = json(&["primitivity", "--max-weight", "3"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["control_primitive"], false);
}

#[test]
fn jennings_and_witness() {
    assert_eq!(run(&["jennings", "--all"]).status.code(), Some(0));
    let o = run(&["witness", "z4", "--element", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("x1"));
}

#[test]
fn multilinearity_and_regularity() {
    assert_eq!(run(&["multilin", "--p", "1", "--q", "1", "--r", "1"]).status.code(), Some(0));
    assert_eq!(run(&["--seed", "3", "regularity", "--count", "3"]).status.code(), Some(0));
}
