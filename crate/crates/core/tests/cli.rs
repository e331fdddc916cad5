//! The `boxball` binary: subcommands, flags, exit codes and run records.

use std::path::PathBuf;
use std::process::{Command, Output};

use boxball::harness::{read_records, RunRecord};
use serde_json::Value;

fn boxball(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxball")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("boxball-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    let _ = std::fs::remove_file(&p);
    p
}

fn last_record(o: &Output) -> RunRecord {
    RunRecord::from_line(stdout(o).lines().last().expect("a record line")).expect("valid record")
}

#[test]
fn evolve_reproduces_the_fifteen_site_rows() {
    let o = boxball(&["evolve", "○●○●●●○○●○○○○○○"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().take(3).collect();
    assert_eq!(rows, ["○●○●●●○○●○○○○○○", "○○●○○○●●○●●○○○○", "○○○●○○○○●○○●●●○"]);
    let rec = last_record(&o);
    assert_eq!(rec.command, "evolve");
    assert_eq!(rec.outputs["rows"][1], "001000110110000");
}

#[test]
fn evolve_on_a_ring_reports_profiles() {
    let o = boxball(&["--render", "none", "--steps", "3", "evolve", "1011000", "--cyclic"]);
    assert_eq!(o.status.code(), Some(0));
    let rec = last_record(&o);
    let profiles = rec.outputs["profiles"].as_array().unwrap();
    assert_eq!(profiles.len(), 4);
    assert!(profiles.iter().all(|p| p == &profiles[0]));
    // density exactly 1/2 is refused
    assert_eq!(boxball(&["evolve", "101100", "--cyclic"]).status.code(), Some(2));
}

#[test]
fn seeded_runs_reproduce() {
    let spec = r#"{"family":"markov","p0":0.11,"p1":0.8}"#;
    let (a, b) = (scratch("a.jsonl"), scratch("b.jsonl"));
    for p in [&a, &b] {
        let o = boxball(&["--seed", "17", "--spec", spec, "--out", p.to_str().unwrap(), "sample", "--count", "5"]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (ra, rb) = (read_records(&a).unwrap(), read_records(&b).unwrap());
    assert_eq!(ra.len(), 1);
    assert!(ra[0].reproduces(&rb[0]));
    let other = boxball(&["--seed", "18", "--spec", spec, "--render", "none", "sample", "--count", "5"]);
    assert!(!last_record(&other).reproduces(&ra[0]));
}

#[test]
fn out_appends_records() {
    let p = scratch("append.jsonl");
    for _ in 0..2 {
        boxball(&["--out", p.to_str().unwrap(), "verify", "fifteen-site"]);
    }
    let recs = read_records(&p).unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0].outputs["pass"], Value::Bool(true));
}

#[test]
fn spec_may_be_a_file() {
    let p = scratch("spec.json");
    std::fs::write(&p, r#"{"family":"cyclic-markov","n":8,"p0":0.11,"p1":0.8}"#).unwrap();
    let o = boxball(&["--spec", p.to_str().unwrap(), "--render", "none", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let tv = last_record(&o).outputs["tv_pushforward"].as_f64().unwrap();
    assert!(tv < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(boxball(&["--spec", "{not json", "sample"]).status.code(), Some(2));
    assert_eq!(boxball(&["--spec", r#"{"family":"bernoulli","p":1.5}"#, "sample"]).status.code(), Some(2));
    assert_eq!(boxball(&["sample"]).status.code(), Some(2));
    assert_eq!(boxball(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(boxball(&["--workers", "0", "verify", "fifteen-site"]).status.code(), Some(2));
    assert_eq!(boxball(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(boxball(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(boxball(&["--render", "none", "verify", "gibbs-invariance"]).status.code(), Some(0));
    assert_eq!(boxball(&["--render", "none", "verify", "broken-step"]).status.code(), Some(1));
    let list = boxball(&["verify", "list"]);
    assert!(stdout(&list).lines().any(|l| l.starts_with("acceptance")));
}

#[test]
fn worker_count_does_not_change_results() {
    let run = |w: &str| last_record(&boxball(&["--seed", "5", "--workers", w, "--render", "none", "verify", "conditioned-walk"]));
    let (one, four) = (run("1"), run("4"));
    assert!(one.reproduces(&four));
}

#[test]
fn limits_toda_and_continuum() {
    let o = boxball(&["--spec", r#"{"family":"markov","p0":0.11,"p1":0.8}"#, "--render", "none", "limits", "--grid", "50,200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(last_record(&o).outputs["decreasing"], Value::Bool(true));

    let state = r#"{"Q":[2,1,3],"E":[4,2,5],"periodic":true,"L":17}"#;
    let o = boxball(&["--spec", state, "--steps", "4", "--render", "none", "toda"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = last_record(&o);
    for s in rec.outputs["states"].as_array().unwrap() {
        let q: f64 = s["Q"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
        assert_eq!(q, 6.0);
    }
    assert_eq!(rec.outputs["shifts"].as_array().unwrap().len(), 4);

    let spec = r#"{"lambda0":1.0,"lambda1":2.0,"last":5.0}"#;
    // the record line after the drawing carries a timestamp
    let svg = |seed: &str| {
        let out = stdout(&boxball(&["--seed", seed, "--spec", spec, "--render", "svg", "continuum"]));
        out[..out.find("</svg>").expect("closed svg") + 6].to_string()
    };
    let a = svg("3");
    assert!(a.starts_with("<svg") || a.starts_with("<?xml"));
    assert_eq!(a, svg("3"));
    assert_ne!(a, svg("4"));
}

#[test]
fn in_process_entry_point() {
    assert_eq!(boxball::harness::cli::run_args(&["--render", "none", "verify", "fifteen-site"]), 0);
}
