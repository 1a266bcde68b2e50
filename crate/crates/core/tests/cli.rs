use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bigaction(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bigaction"))
        .args(args)
        .env_remove("BIGACTION_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

#[test]
fn verify_small_case() {
    let out = bigaction(&["verify", "--p", "3", "--s", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["big_action"]["big_action"], false);
    let m: Vec<u64> = v["conductors"].as_array().unwrap().iter().map(|c| c["conductor"].as_u64().unwrap()).collect();
    assert_eq!(&m[..4], &[38, 254, 281, 308]);
    assert_eq!(v["status"]["integrity_failures"].as_array().unwrap().len(), 0);
    assert_eq!(v["config"]["seed"], bigaction::report::DEFAULT_SEED);
}

#[test]
fn verify_big_case() {
    let out = bigaction(&["verify", "--p", "3", "--s", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["big_action"]["big_action"], true);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bigaction(&["verify", "--p", "2", "--s", "1"]).status.code(), Some(2));
    assert_eq!(bigaction(&["verify", "--p", "9", "--s", "1"]).status.code(), Some(2));
    assert_eq!(bigaction(&["verify", "--p", "3", "--s", "0"]).status.code(), Some(2));
    assert_eq!(bigaction(&["conductor", "--class", "nope", "--p", "3", "--s", "1"]).status.code(), Some(2));
    assert_eq!(bigaction(&["prolong", "--a", "1,x", "--p", "3", "--s", "1"]).status.code(), Some(2));
    assert_eq!(bigaction(&["prolong", "--a", "1,0,0,1", "--p", "3", "--s", "1"]).status.code(), Some(2));
    assert_eq!(bigaction(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bigaction(&[]).status.code(), Some(2));
}

#[test]
fn conductor_subcommand() {
    let out = bigaction(&["conductor", "--class", "w", "--p", "5", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["conductors"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["conductor"], 3402);
}

#[test]
fn prolong_subcommand() {
    let out = bigaction(&["prolong", "--a", "1", "--p", "3", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let sample = &v["prolongation"]["samples"][0];
    assert_eq!(sample["images"]["y1"], "x + y1");
    assert_eq!(sample["multiplicity"], "14348907");
}

#[test]
fn commutators_subcommand() {
    let out = bigaction(&["commutators", "--p", "5", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["commutators"]["sigma_tau_w_shift"].as_array().unwrap().len(), 3);
    assert_eq!(v["commutators"]["same_type_commute"], true);
}

#[test]
fn audit_and_markdown() {
    let out = bigaction(&["audit", "--p", "3", "--s", "1", "--format", "md"]);
    assert_eq!(out.status.code(), Some(3));
    let md = String::from_utf8(out.stdout).unwrap();
    assert!(md.contains("| genus_w |"));
    assert!(md.contains("MISMATCH"));
    assert!(md.contains("670.5"));
}

#[test]
fn genus_subcommand_exit_0() {
    let out = bigaction(&["genus", "--p", "3", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["genus"]["genus_F"], "143210574");
}

#[test]
fn thread_count_does_not_change_the_report() {
    let a = bigaction(&["verify", "--p", "5", "--s", "1", "--threads", "1"]);
    let b = bigaction(&["verify", "--p", "5", "--s", "1", "--threads", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_and_samples_are_recorded() {
    let out = bigaction(&["genus", "--p", "3", "--s", "1", "--seed", "11", "--samples", "5"]);
    let v = json(&out);
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(v["conductors"][0]["samples_checked"], 5);
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn cold_and_warm_cache_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cold = dir.path().join("cold.json");
    let warm = dir.path().join("warm.json");
    let base = ["verify", "--p", "3", "--s", "2", "--cache-dir", cache.to_str().unwrap()];
    let a = bigaction(&[&base[..], &["--out", cold.to_str().unwrap()]].concat());
    assert_eq!(a.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&a.stderr).contains("cache: Miss"));
    let entries: Vec<_> = std::fs::read_dir(&cache).unwrap().collect();
    assert_eq!(entries.len(), 1);

    let b = Command::new(env!("CARGO_BIN_EXE_bigaction"))
        .args(["verify", "--p", "3", "--s", "2", "--out", warm.to_str().unwrap()])
        .env("BIGACTION_CACHE_DIR", &cache)
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&b.stderr).contains("cache: Hit"));
    assert_eq!(read(&cold), read(&warm));
    assert!(dir.path().join("cold.json.timings.json").exists());
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let params = bigaction::Params::new(3, 1).unwrap();
    let path = bigaction::cache::cache_path(dir.path(), params);
    std::fs::write(&path, r#"{"key": {"p": 3, "s": 1, "version": "0.1.0"}, "uniformizer": {}}"#).unwrap();
    let args = ["genus", "--p", "3", "--s", "1", "--cache-dir", dir.path().to_str().unwrap()];
    let a = bigaction(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&a.stderr).contains("cache: Miss"));
    let b = bigaction(&args);
    assert!(String::from_utf8_lossy(&b.stderr).contains("cache: Hit"));
    assert_eq!(a.stdout, b.stdout);
}
