use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_multmap"));
    cmd.env_remove("MULTMAP_DEGREE_CAP");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("multmap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn z3_file() -> PathBuf {
    let path = scratch("z3.json");
    std::fs::write(&path, r#"{"degree":3,"coeffs":[[0.0,0.0],[0.0,0.0]]}"#).unwrap();
    path
}

fn multipliers(v: &Value) -> Vec<(f64, f64)> {
    v["orbits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o["multiplier"][0].as_f64().unwrap(), o["multiplier"][1].as_f64().unwrap()))
        .collect()
}

#[test]
fn orbits_of_z3() {
    let poly = z3_file();
    let out = run(&["orbits", "--poly", poly.to_str().unwrap(), "--period", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let mult = multipliers(&json(&out));
    assert_eq!(mult.len(), 3);
    assert!(mult.iter().all(|&(re, im)| (re - 9.0).abs() < 1e-10 && im.abs() < 1e-10));

    let out = run(&["orbits", "--poly", poly.to_str().unwrap(), "--period", "1"]);
    let mut re: Vec<f64> = multipliers(&json(&out)).iter().map(|m| m.0).collect();
    re.sort_by(f64::total_cmp);
    assert!((re[0]).abs() < 1e-12 && (re[1] - 3.0).abs() < 1e-12 && (re[2] - 3.0).abs() < 1e-12);
}

#[test]
fn orbits_reads_stdin() {
    let out = run_stdin(&["orbits", "--period", "1"], r#"{"degree":2,"coeffs":[[-1.0,0.0]]}"#);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["orbits"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_input_exits_2() {
    let out = run_stdin(&["orbits", "--period", "1"], "{not json");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed polynomial JSON"));
    let out = run_stdin(&["orbits", "--period", "1"], r#"{"degree":3,"coeffs":[[0.0,0.0]]}"#);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["orbits", "--period", "x"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn degree_cap_from_environment() {
    let poly = z3_file();
    let out = bin()
        .env("MULTMAP_DEGREE_CAP", "10")
        .args(["orbits", "--poly", poly.to_str().unwrap(), "--period", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = bin().env("MULTMAP_DEGREE_CAP", "lots").args(["blaschke", "--a", "0,0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_passes_and_checks_arity() {
    for periods in ["1,2", "2,2"] {
        let out = run(&["certify", "--n", "3", "--periods", periods, "--trials", "50", "--seed", "7"]);
        assert_eq!(out.status.code(), Some(0), "periods {periods}");
        assert_eq!(json(&out)["pass"], Value::Bool(true));
    }
    assert_eq!(run(&["certify", "--n", "3", "--periods", "1"]).status.code(), Some(2));
}

#[test]
fn certify_csv_layout() {
    let out = run(&["certify", "--n", "3", "--periods", "1,1", "--trials", "4", "--seed", "3", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "seed_index,status,rank,sigma_min,sigma_max");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,ok,2,"));
}

#[test]
fn construct_examples() {
    for (n, periods, want) in [("3", "2,3", vec![2, 3]), ("3", "1,1", vec![1, 1]), ("2", "3", vec![3])] {
        let out = run(&["construct", "--n", n, "--periods", periods, "--seed", "1"]);
        assert_eq!(out.status.code(), Some(0), "{n} {periods}");
        let v = json(&out);
        assert_eq!(v["audit_pass"], Value::Bool(true));
        let attracting = v["audit"]["attracting"].as_array().unwrap();
        let got: Vec<u64> = attracting.iter().map(|o| o["period"].as_u64().unwrap()).collect();
        assert_eq!(got, want.iter().map(|&p| p as u64).collect::<Vec<_>>());
        for o in attracting {
            assert!((o["multiplier"][0].as_f64().unwrap() - 0.5).abs() < 1e-10);
            assert!(o["multiplier"][1].as_f64().unwrap().abs() < 1e-10);
        }
        assert_eq!(v["path"]["status"], "converged");
        assert!(v["path"]["steps"].as_array().unwrap().len() <= 2);
    }
}

#[test]
fn construct_trace_keeps_steps() {
    let out = run(&["construct", "--n", "3", "--periods", "2,2", "--seed", "1", "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    let steps = json(&out)["path"]["steps"].as_array().unwrap().len();
    assert!(steps > 2);

    let out = run(&["construct", "--n", "3", "--periods", "2,2", "--seed", "1", "--trace", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, "step,step_size,lambda_0_re,lambda_0_im,lambda_1_re,lambda_1_im,c_0_re,c_0_im,c_1_re,c_1_im");
    assert_eq!(text.lines().count(), steps + 1);
}

#[test]
fn blaschke_examples() {
    let out = run(&["blaschke", "--a", "0.5,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["multiplier"][0].as_f64().unwrap() + 0.5).abs() < 1e-15);
    assert!(v["modulus_gap"].as_f64().unwrap() < 1e-15);

    let v = json(&run(&["blaschke", "--lambda", "-0.5,0"]));
    assert!((v["a"][0].as_f64().unwrap() - 0.5).abs() < 1e-15);

    assert_eq!(run(&["blaschke", "--a", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["blaschke", "--lambda", "0,1.5"]).status.code(), Some(2));
    assert_eq!(run(&["blaschke"]).status.code(), Some(2));
    assert_eq!(run(&["blaschke", "--a", "0,0", "--lambda", "0,0"]).status.code(), Some(2));
}

#[test]
fn audit_of_basilica() {
    let out = run_stdin(&["audit", "--max-period", "2"], r#"{"degree":2,"coeffs":[[-1.0,0.0]]}"#);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["attracting"][0]["period"], 2);
    assert_eq!(v["bound_ok"], Value::Bool(true));
}

#[test]
fn manifest_and_replay_are_reproducible() {
    let manifest = scratch("construct-manifest.json");
    let args = ["construct", "--n", "3", "--periods", "2,3", "--seed", "1"];
    let first = bin().args(args).arg("--manifest").arg(&manifest).output().unwrap();
    assert_eq!(first.status.code(), Some(0));
    assert!(first.stderr.is_empty());

    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "construct");
    assert_eq!(m["seed"], 1);
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(m["timestamp"].as_str().unwrap().ends_with('Z'));

    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let replayed = run(&["replay", manifest.to_str().unwrap()]);
    assert_eq!(replayed.status.code(), Some(0));
    assert_eq!(first.stdout, replayed.stdout);
}

#[test]
fn certify_output_is_byte_identical() {
    let args = ["certify", "--n", "4", "--periods", "1,2,3", "--trials", "20", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn manifest_goes_to_stderr_by_default() {
    let out = run(&["blaschke", "--a", "0.25,0.25"]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    let m: Value = serde_json::from_str(stderr.lines().next().unwrap()).unwrap();
    assert_eq!(m["command"], "blaschke");
    assert_eq!(m["inputs"]["a"][0], 0.25);
}
