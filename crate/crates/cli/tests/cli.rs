//! End-to-end runs of the `sknap` binary.

use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

const UNIT: &str = r#"{"prices": [1.0, 0.8, 0.65, 0.45], "rates": [0.2, 0.3, 0.1, 0.4], "W": 12, "T": 20.0}"#;
const BATCH: &str = r#"{"prices": [1.0, 0.8, 0.65, 0.45], "rates": [0.2, 0.3, 0.1, 0.4],
    "batch": {"kind": "negative_binomial", "r": 4, "p": 0.33}, "W": 40, "T": 20.0}"#;
const PRICE_DEPENDENT: &str = r#"{"prices": [1.0, 0.6], "rates": [0.8, 1.2],
    "batches": [{"kind": "pmf", "pmf": [0.0, 0.2, 0.8]}, {"kind": "pmf", "pmf": [0.0, 0.7, 0.1, 0.1, 0.1]}],
    "W": 3, "T": 2.0}"#;

fn sknap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sknap"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("SKNAP_OUT_DIR")
        .output()
        .unwrap()
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

fn stderr_record(out: &Output) -> Value {
    serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap()
}

#[test]
fn solve_dp_writes_value_table() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "unit.json", UNIT);
    let out = sknap(tmp.path(), &["solve-dp", "--config", &cfg, "--delta", "0.05"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&tmp.path().join("solve_dp.json"));
    assert_eq!(json["periods"], 400);
    assert!(json["thresholds"]["violations"].as_array().unwrap().is_empty());
    let csv = fs::read_to_string(tmp.path().join("solve_dp.csv")).unwrap();
    assert!(csv.starts_with("n,d,value\n"));
    assert_eq!(csv.lines().count(), 1 + 401 * 13);
}

#[test]
fn switchover_round_trips_through_warm_start() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "unit.json", UNIT);
    let first = tmp.path().join("first");
    let out = sknap(&first, &["optimize-switchover", "--config", &cfg]);
    assert!(out.status.success());
    let csv = fs::read_to_string(first.join("switchover.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("l,t,mu,y"));
    assert_eq!(csv.lines().count(), 5);
    let warm = first.join("switchover.json");
    let out = sknap(tmp.path(), &["optimize-switchover", "--config", &cfg, "--warm-start", warm.to_str().unwrap()]);
    assert!(out.status.success());
    let again = read_json(&tmp.path().join("switchover.json"));
    assert!(again["warm_start_max_change"].as_f64().unwrap() <= 1e-9);
    assert!(again["max_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn batch_instances_need_the_batch_flag() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "batch.json", BATCH);
    let out = sknap(tmp.path(), &["optimize-switchover", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_record(&out)["error"], "validation");
    let out = sknap(tmp.path(), &["optimize-switchover", "--config", &cfg, "--batch"]);
    assert!(out.status.success());
    let json = read_json(&tmp.path().join("switchover.json"));
    assert_eq!(json["switch_times"].as_array().unwrap().len(), 3);
}

#[test]
fn price_dependent_warm_start_reproduces_solution() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "pd.json", PRICE_DEPENDENT);
    let first = tmp.path().join("first");
    assert!(sknap(&first, &["optimize-switchover", "--config", &cfg, "--batch"]).status.success());
    let warm = first.join("switchover.json");
    let out = sknap(tmp.path(), &["optimize-switchover", "--config", &cfg, "--batch", "--warm-start", warm.to_str().unwrap()]);
    assert!(out.status.success());
    let a = read_json(&warm)["solution"]["objective_revenue"].as_f64().unwrap();
    let b = read_json(&tmp.path().join("switchover.json"))["solution"]["objective_revenue"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-9);
}

#[test]
fn pricing_from_flags_matches_reference_row() {
    let tmp = TempDir::new().unwrap();
    let out = sknap(
        tmp.path(),
        &["optimize-pricing", "--demand", "exponential", "--a", "40", "--b", "2", "--periods", "3", "--inventory", "40"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&tmp.path().join("pricing.json"));
    let obj = json["solution"]["objective"].as_f64().unwrap();
    assert!((obj - 19.95).abs() / 19.95 < 0.01);
    let csv = fs::read_to_string(tmp.path().join("pricing.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("period,price,markdown"));

    let approx = tmp.path().join("approx");
    let out = sknap(
        &approx,
        &["optimize-pricing", "--demand", "exponential", "--a", "40", "--b", "2", "--periods", "3", "--inventory", "40", "--method", "approx", "--free-p1"],
    );
    assert!(out.status.success());
    let missing = sknap(tmp.path(), &["optimize-pricing", "--demand", "linear"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn compare_is_deterministic_and_has_the_documented_columns() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "batch.json", BATCH);
    let run = |dir: &Path| {
        let out = sknap(dir, &["compare", "--config", &cfg, "--reps", "2000", "--seed", "9", "--jobs", "2"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(dir.join("compare.csv")).unwrap()
    };
    let a = run(&tmp.path().join("a"));
    let b = run(&tmp.path().join("b"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next(), Some("policy,W,T,mean,ci99,pct_off_best"));
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().any(|l| l.starts_with("dp_optimal,40,20,")));
}

#[test]
fn simulate_single_policy() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "unit.json", UNIT);
    let out = sknap(tmp.path(), &["simulate", "--config", &cfg, "--policy", "fcfs", "--reps", "1000"]);
    assert!(out.status.success());
    let json = read_json(&tmp.path().join("simulate.json"));
    assert_eq!(json["policy"], "fcfs");
    assert_eq!(json["estimate"]["replications"], 1000);
}

#[test]
fn bounds_sweep_rows() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "unit.json", UNIT);
    let out = sknap(tmp.path(), &["bounds", "--config", &cfg, "--sweep", "12,24,48:60"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(tmp.path().join("bounds.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "W,T,upper,lower,switch,rel_gap");
    assert!(lines[2].starts_with("24,40,"));
    assert!(lines[3].starts_with("48,60,"));
    let batch = config(tmp.path(), "batch.json", BATCH);
    assert_eq!(sknap(tmp.path(), &["bounds", "--config", &batch]).status.code(), Some(4));
}

#[test]
fn reproduce_table_three() {
    let tmp = TempDir::new().unwrap();
    let out = sknap(tmp.path(), &["reproduce", "table3"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(tmp.path().join("table3.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(read_json(&tmp.path().join("table3.json"))["rows"].is_array());
    let bad = sknap(tmp.path(), &["reproduce", "table9"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn environment_sets_default_output_directory() {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sknap"))
        .args(["reproduce", "table3"])
        .env("SKNAP_OUT_DIR", tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("table3.csv").exists());
}

#[test]
fn failures_leave_no_files_and_report_json() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("out");
    let broken = config(tmp.path(), "broken.json", "{\"prices\": [1.0,");
    let out = sknap(&out_dir, &["solve-dp", "--config", &broken]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_record(&out)["exit_code"], 3);

    let invalid = config(tmp.path(), "invalid.json", r#"{"prices": [0.5, 1.0], "rates": [1.0, 1.0], "W": 3, "T": 2.0}"#);
    let out = sknap(&out_dir, &["solve-dp", "--config", &invalid]);
    assert_eq!(out.status.code(), Some(4));

    let missing = tmp.path().join("nope.json");
    let out = sknap(&out_dir, &["simulate", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let unit = config(tmp.path(), "unit.json", UNIT);
    let out = sknap(&out_dir, &["solve-dp", "--config", &unit, "--delta", "2.0"]);
    assert_eq!(out.status.code(), Some(4), "load above one is rejected");

    assert_eq!(sknap(&out_dir, &["frobnicate"]).status.code(), Some(2));
    assert!(!out_dir.exists() || files(&out_dir).is_empty());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = sknap(&blocker.join("sub"), &["reproduce", "table3"]);
    assert_eq!(out.status.code(), Some(6));
}
