use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn kplane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kplane")).args(args).output().expect("spawn kplane")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn csv_rows(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn transform_of_extremizer_matches_closed_form() {
    let out = kplane(&["transform", "--k", "2", "--d", "3", "--preset", "extremizer", "--grid-n", "512"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# kplane "));
    assert!(text.contains("# params k=2 d=3"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 512);
    // The transform of (1+r^2)^{-(d+1)/(2p)} is a multiple of (1+r^2)^{-1/2}; compare shapes.
    let c = rows[0].1 * (1.0 + rows[0].0 * rows[0].0).sqrt();
    for &(r, v) in rows.iter().filter(|(r, _)| *r < 50.0) {
        let want = c / (1.0 + r * r).sqrt();
        assert!((v - want).abs() <= 1e-6 * c, "r={r} v={v} want={want}");
    }
}

#[test]
fn transform_rejects_bad_parameters_and_empty_input() {
    assert_eq!(code(&kplane(&["transform", "--k", "3", "--d", "3", "--preset", "extremizer"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "r,value\n").unwrap();
    let out = kplane(&["transform", "--k", "1", "--d", "3", "--input", empty.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn transform_round_trips_a_file_profile() {
    let dir = tempfile::tempdir().unwrap();
    let prof = dir.path().join("h.csv");
    let out = kplane(&["search", "--k", "1", "--d", "3", "--grid-n", "256", "--out", dir.path().join("t.json").to_str().unwrap(), "--profile-out", prof.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = kplane(&["transform", "--k", "1", "--d", "3", "--grid-n", "256", "--input", prof.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(csv_rows(&String::from_utf8(out.stdout).unwrap()).iter().all(|(_, v)| v.is_finite() && *v >= 0.0));
}

#[test]
fn constants_match_frozen_values() {
    let b = json(&kplane(&["constant", "--k", "2", "--d", "4", "--which", "B"]));
    // B(2,4) = (1/3)^{1/5} / (2/3)^{3/5}.
    assert!((b["value"].as_f64().unwrap() - 1.0238362555).abs() < 1e-6, "{b}");
    assert_eq!(b["schema"], 1);
    let a = json(&kplane(&["constant", "--k", "1", "--d", "2", "--which", "A"]));
    // A(1,2) = (pi/2)^{1/3}.
    assert!((a["value"].as_f64().unwrap() - 1.1624473515096265).abs() < 1e-12, "{a}");
    assert_eq!(code(&kplane(&["constant", "--k", "1", "--d", "2"])), 2);
}

#[test]
fn search_converges_to_the_sharp_constant() {
    let b = json(&kplane(&["constant", "--k", "1", "--d", "3", "--which", "B"]))["value"].as_f64().unwrap();
    let out = kplane(&["search", "--k", "1", "--d", "3", "--grid-n", "512"]);
    assert_eq!(code(&out), 0);
    let trace = json(&out);
    let phi = trace["final_ratio"].as_f64().unwrap();
    assert!((phi / b - 1.0).abs() < 1e-3, "phi {phi} b {b}");
    assert!((trace["constant_b"].as_f64().unwrap() - b).abs() < 1e-3 * b);
}

#[test]
fn seeded_search_is_reproducible_and_cap_exits_3() {
    let a = kplane(&["search", "--k", "1", "--d", "3", "--grid-n", "256", "--init", "random:42"]);
    let b = kplane(&["search", "--k", "1", "--d", "3", "--grid-n", "256", "--init", "random:42"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&kplane(&["search", "--k", "1", "--d", "3", "--grid-n", "256", "--max-iter", "1"])), 3);
}

#[test]
fn diagnose_classifies_synthetic_sequences() {
    let out = kplane(&["diagnose", "--k", "1", "--d", "3", "--grid-n", "512", "--synthetic", "dichotomy:0.4"]);
    assert_eq!(code(&out), 0);
    let rep = &json(&out)["report"];
    assert_eq!(rep["verdict"], "Dichotomy");
    assert!((rep["alpha_estimate"].as_f64().unwrap() - 0.4).abs() < 0.05);
    let out = kplane(&["diagnose", "--k", "1", "--d", "3", "--grid-n", "512", "--synthetic", "tight"]);
    assert_eq!(json(&out)["report"]["verdict"], "Tight");
}

#[test]
fn diagnose_single_profile_has_no_trend() {
    let dir = tempfile::tempdir().unwrap();
    let prof = dir.path().join("h.csv");
    kplane(&["search", "--k", "1", "--d", "3", "--grid-n", "256", "--out", dir.path().join("t.json").to_str().unwrap(), "--profile-out", prof.to_str().unwrap()]);
    let out = kplane(&["diagnose", "--k", "1", "--d", "3", "--grid-n", "256", "--inputs", prof.to_str().unwrap(), "--auto-normalize"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = &json(&out)["report"];
    assert!(rep["alpha_estimate"].is_null());
}

#[test]
fn verify_superadditivity_passes() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.csv");
    let out = kplane(&["verify", "--suite", "superadd", "--k", "3", "--d", "4", "--summary", summary.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let lines: Vec<Value> = String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["schema"], 1);
    assert!(lines[1..].iter().all(|l| l["report"]["passed"] == true));
    let s = fs::read_to_string(summary).unwrap();
    assert!(s.contains("superadd,3,4,1,0,"));
}

#[test]
fn verify_is_reproducible_under_a_seed() {
    let args = ["verify", "--suite", "concentration-k2-weighted", "--k", "2", "--d", "3", "--seed", "7", "--trials", "10"];
    let a = kplane(&args);
    let b = kplane(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_usage_errors_exit_2() {
    assert_eq!(code(&kplane(&["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&kplane(&["verify", "--suite", "all", "--k", "1", "--d", "3"])), 2);
    assert_eq!(code(&kplane(&["verify", "--suite", "slide", "--k", "1"])), 2);
}
