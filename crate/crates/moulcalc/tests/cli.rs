use std::path::PathBuf;
use std::process::Command;

use moulcalc::cli::run;
use serde_json::Value;

const FIELD_25: &str = r#"{"nu":2,"lambda":["2","5"],"terms":[
  {"coef":"1","exponents":[2,0],"direction":0},
  {"coef":"3","exponents":[1,1],"direction":1},
  {"coef":"1/2","exponents":[1,1],"direction":0},
  {"coef":"-2","exponents":[0,2],"direction":1}]}"#;

const RESONANT: &str = r#"{"nu":2,"lambda":["1","-1"],"terms":[
  {"coef":"1","exponents":[2,1],"direction":0},
  {"coef":"1","exponents":[2,0],"direction":1},
  {"coef":"3","exponents":[1,1],"direction":0}]}"#;

const DIFFEO: &str = r#"{"nu":1,"multipliers":["3"],"terms":[{"coef":"1","exponents":[2],"direction":0}]}"#;

fn write_tmp(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("moulcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn cli(args: &[&str]) -> moulcalc::cli::Outcome {
    run(std::iter::once("moulcalc").chain(args.iter().copied()))
}

#[test]
fn show_prints_exact_value() {
    let out = cli(&["mould", "show", "--name", "Exp", "--word", "1,2,3"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.trim(), "1/6");
}

#[test]
fn check_j_alternel_exits_zero() {
    let out = cli(&["mould", "check", "--name", "J", "--symmetry", "alternel", "--max-len", "4"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["report"]["verdict"], Value::Bool(true));
}

#[test]
fn false_symmetry_exits_two_with_counterexample() {
    let out = cli(&["mould", "check", "--name", "Exp", "--symmetry", "alternal", "--max-len", "3"]);
    assert_eq!(out.code, 2);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(v["report"]["counterexample"].is_object());
}

#[test]
fn field_linearize_verifies_oracle() {
    let f = write_tmp("f25.json", FIELD_25);
    let out = cli(&["field", "linearize", "--input", f.to_str().unwrap(), "--degree", "5", "--verify-oracle"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["oracle_agrees"], Value::Bool(true));
    assert_eq!(v["conjugated"][1][0]["coef"], Value::String("5/1".into()));
}

#[test]
fn prenormal_and_diffeo_verify() {
    let r = write_tmp("res.json", RESONANT);
    let out = cli(&["field", "prenormal", "--input", r.to_str().unwrap(), "--degree", "4", "--verify-oracle"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let out = cli(&["field", "linearize", "--input", r.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("resonant"));
    let d = write_tmp("d.json", DIFFEO);
    let out = cli(&["diffeo", "linearize", "--input", d.to_str().unwrap(), "--verify-oracle"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
}

#[test]
fn arb_expand_reports_forests() {
    let out = cli(&["arb", "expand", "--word", "[1,0],[0,1]"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["forests"].as_array().unwrap().len(), 2);
    assert_eq!(v["residual_zero"], Value::Bool(true));
}

#[test]
fn mould_ops_and_export_round_trip() {
    let out = cli(&["mould", "op", "--op", "mul", "--name", "Exp", "--with", "one", "--word", "1,2"]);
    assert_eq!(out.stdout.trim(), "1/2");
    let out = cli(&["mould", "show", "--name", "Na", "--export", "--max-len", "2", "--alphabet", "1,2"]);
    assert_eq!(out.code, 0);
    let path = write_tmp("na.json", &out.stdout);
    let arg = format!("@{}", path.display());
    let back = cli(&["mould", "show", "--name", &arg, "--word", "1,2"]);
    let direct = cli(&["mould", "show", "--name", "Na", "--word", "1,2"]);
    assert_eq!(back.stdout, direct.stdout);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&["bogus"]).code, 1);
    assert_eq!(cli(&["mould", "show", "--name", "Nope", "--word", "1"]).code, 1);
    assert_eq!(cli(&["field", "scan", "--input", "/nonexistent/x.json"]).code, 1);
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let bin = env!("CARGO_BIN_EXE_moulcalc");
    let args = ["mould", "check", "--name", "Se", "--symmetry", "symetrel", "--max-len", "3", "--seed", "7"];
    let a = Command::new(bin).args(args).output().unwrap();
    let b = Command::new(bin).args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let f = write_tmp("f25b.json", FIELD_25);
    let args = ["field", "linearize", "--input", f.to_str().unwrap(), "--degree", "4"];
    let a = Command::new(bin).args(args).output().unwrap();
    let b = Command::new(bin).args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}
