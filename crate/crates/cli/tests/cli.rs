use std::fs;
use std::process::{Command, Output};

fn foalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foalg")).args(args).output().expect("run foalg")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gallery_diamond_prints_the_instance() {
    let out = foalg(&["gallery", "diamond"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("c1(b) ∨ c2(0) ≥ c1(a) ∧ c2(b), b ≱ a, 0 ≱ b"));
}

#[test]
fn gallery_pe_theory_json() {
    let out = foalg(&["--format", "json", "gallery", "pe-theory"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["sizes"][0], 2);
    assert_eq!(v["failed"].as_array().unwrap().len(), 0);
}

#[test]
fn axioms_check_exit_codes() {
    let pass = foalg(&["axioms", "check", "--algebra", "builtin:concrete:1", "--fragment", "qf", "--max-sort", "2"]);
    assert_eq!(pass.status.code(), Some(0), "{}", stdout(&pass));
    assert!(stdout(&pass).contains("seed 24301"));
    let fail = foalg(&["axioms", "check", "--algebra", "builtin:diamond", "--fragment", "qf", "--max-sort", "2", "--axiom", "0"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(stdout(&fail).contains("verdict: failed: 0"));
}

#[test]
fn axioms_check_json_lines_are_deterministic() {
    let args = [
        "--format", "json", "axioms", "check", "--algebra", "builtin:concrete:2", "--fragment", "pqf",
        "--max-sort", "3", "--axiom", "0", "--samples", "2000", "--exhaustive-cap", "100", "--seed", "7",
    ];
    let a = foalg(&args);
    let mut seq = vec!["--sequential"];
    seq.extend_from_slice(&args);
    let b = foalg(&seq);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    for line in stdout(&a).lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
    assert!(stdout(&a).contains("\"seed\":7"));
}

#[test]
fn primefilters_lists_generators() {
    let out = foalg(&["--format", "json", "primefilters", "--algebra", "builtin:diamond", "--sort", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["generator"], 1);
    assert_eq!(lines[1]["members"], serde_json::json!([2, 3]));
}

#[test]
fn embed_full_and_obstructed() {
    let ok = foalg(&["embed", "--algebra", "builtin:concrete:1", "--fragment", "pqf", "--scope", "2", "--anonymize", "5"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("status full"));
    let bad = foalg(&["embed", "--algebra", "builtin:diamond", "--fragment", "qf", "--scope", "2"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("obstruction"));
}

#[test]
fn export_round_trips_through_a_file() {
    let out = foalg(&["export", "--algebra", "builtin:concrete:1", "--fragment", "qf", "--max-sort", "2", "--shuffle", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tables.json");
    fs::write(&path, &out.stdout).unwrap();
    let check = foalg(&["axioms", "check", "--algebra", path.to_str().unwrap(), "--fragment", "qf", "--max-sort", "2"]);
    assert_eq!(check.status.code(), Some(0), "{}", stdout(&check));
}

#[test]
fn eval_modes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    fs::write(&path, r#"{"universe":2,"relations":{"R":{"arity":2,"tuples":[[0,1],[1,1]]}}}"#).unwrap();
    let p = path.to_str().unwrap();
    let out = foalg(&["eval", "--structure", p, "--formula", "[x] exists y R(x,y)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("{(0),(1)}"));
    let out = foalg(&["--format", "json", "eval", "--structure", p, "--formula", "[x] ~R(x,x)", "--mode", "naive"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(v["relation"].as_str().unwrap().contains("{(0)}"));
}

#[test]
fn errors_exit_two() {
    assert_eq!(foalg(&["axioms", "check", "--algebra", "builtin:nope", "--fragment", "qf"]).status.code(), Some(2));
    assert_eq!(foalg(&["primefilters", "--algebra", "/no/such/file", "--sort", "0"]).status.code(), Some(2));
    assert_eq!(foalg(&["gallery", "unknown"]).status.code(), Some(2));
}
