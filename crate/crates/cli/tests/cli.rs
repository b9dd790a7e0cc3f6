use std::path::PathBuf;
use std::process::{Command, Output};

fn sample(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "samples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn sci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sci")).args(args).output().expect("sci runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn swap_denotation_as_json() {
    let o = sci(&["denote", &sample("swap.sci"), "--max-nat", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let elems = v["elems"].as_array().unwrap();
    assert_eq!(elems.len(), 8);
    assert!(elems.iter().all(|e| e["out"] == "*"));
    let again = sci(&["denote", &sample("swap.sci"), "--max-nat", "1", "--format", "json"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn separation_pair_differs() {
    let o = sci(&["equiv", &sample("a.sci"), &sample("b.sci")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("([W(3)], *)"), "{}", stdout(&o));
    let j = sci(&["equiv", &sample("a.sci"), &sample("b.sci"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["witness"]["inputs"], serde_json::json!([["W(3)"]]));
    assert_eq!(sci(&["equiv", &sample("a.sci"), &sample("a.sci")]).status.code(), Some(0));
}

#[test]
fn run_closed_term() {
    let o = sci(&["run", &sample("closed.sci")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn run_with_initial_store() {
    let o = sci(&["run", &sample("swap.sci"), "--set", "x=1", "--set", "y=2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("x=2, y=1"));
}

#[test]
fn check_prints_type() {
    let o = sci(&["check", &sample("swap.sci")]);
    assert_eq!(stdout(&o).trim(), "comm");
}

#[test]
fn usage_and_type_errors_exit_2() {
    assert_eq!(sci(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sci(&["denote", "/nonexistent.sci"]).status.code(), Some(2));
    assert_eq!(sci(&["retract", "--type", "nat -o"]).status.code(), Some(2));
    assert_eq!(sci(&["test-gen", "--type", "comm", "[R(1)]"]).status.code(), Some(2));
}

#[test]
fn analyses_succeed_on_samples() {
    assert_eq!(sci(&["good", &sample("swap.sci")]).status.code(), Some(0));
    assert_eq!(sci(&["cohere", &sample("closed.sci")]).status.code(), Some(0));
    assert_eq!(sci(&["retract", "--type", "var"]).status.code(), Some(0));
}

#[test]
fn generated_terms_print() {
    let o = sci(&["test-gen", "--type", "var", "[R(1) W(2)]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("x:var |- "));
    let p = sci(&["produce-gen", "--type", "nat", "[3]", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&p.stdout).unwrap();
    assert!(v["term"].is_string());
}
