use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;
use sharp_embed::quadrature::period_integral;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharp-embed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn csv_rows(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn constant_below_threshold() {
    let o = run(&["constant", "--q", "4", "--r", "1", "--T", "1", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["status"], "exact_constant_minimizer");
    assert!((v["value"].as_f64().unwrap() - 1.1892071).abs() < 1e-7);
    assert_eq!(v["value"].as_f64().unwrap(), 2f64.powf(0.25));
}

#[test]
fn count_example() {
    let o = run(&["count", "--q", "4", "--T", "3.14159265"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["k"], 2);
    assert_eq!(v["solvable_n"], serde_json::json!([1]));
}

#[test]
fn integral_round_trips_bit_exactly() {
    let o = run(&["integral", "--q", "4", "--alpha", "0.2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let lib = period_integral(4.0, 0.2, 1e-10).unwrap();
    assert_eq!(v["value"].as_f64().unwrap().to_bits(), lib.value.to_bits());
    assert_eq!(
        v["error_estimate"].as_f64().unwrap().to_bits(),
        lib.abs_error_estimate.to_bits()
    );
    assert!(v["derivative"].as_f64().unwrap() < 0.0);
}

#[test]
fn identical_requests_give_identical_bytes() {
    let args = ["sweep", "--quantity", "integral", "--q", "3:4", "--q-steps", "3", "--alpha", "0.01:0.1", "--steps", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_input_exits_1() {
    assert_eq!(code(&run(&["integral", "--q", "4", "--alpha", "0.3"])), 1);
    assert_eq!(code(&run(&["integral", "--q", "4"])), 1);
    assert_eq!(code(&run(&["integral", "--q", "1.5", "--alpha", "0.1"])), 1);
    assert_eq!(code(&run(&["constant", "--q", "4", "--T", "1", "--tol", "0"])), 1);
    assert_eq!(code(&run(&["certify", "--suite", "nope"])), 1);
    assert_eq!(code(&run(&["bogus"])), 1);
    let o = run(&["count", "--q", "4", "--T", "-1"]);
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn unreachable_tolerance_exits_3() {
    let o = run(&["integral", "--q", "4", "--alpha", "0.2", "--tol", "1e-18"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no convergence"));
}

#[test]
fn certify_all_passes() {
    let o = run(&["certify", "--suite", "all"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    let parts = v["parts"].as_array().unwrap();
    assert_eq!(parts.len(), 5);
    for p in parts {
        assert_eq!(p["passed"], true);
        assert!(p["margin"].as_f64().unwrap() > 0.0);
        assert!(!p["grid_spec"].as_str().unwrap().is_empty());
    }
}

#[test]
fn certify_refined_csv() {
    let o = run(&["certify", "--suite", "chain", "--refine", "--csv"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["certificate", "passed", "margin", "checks", "grid_spec"]);
    // eight chain steps at two densities
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r[1] == "true"));
}

#[test]
fn certify_single_point() {
    let o = run(&["certify", "--suite", "lemma22", "--q", "3.5", "--alpha", "0.1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let crossings = v["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|w| w["value"] == 0.0)
        .count();
    assert_eq!(crossings, 2);
}

#[test]
fn sweep_integral_decreases_to_limit() {
    let o = run(&["sweep", "--quantity", "integral", "--q", "4", "--alpha", "0.02:0.24", "--steps", "50"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["q", "alpha", "value", "error_estimate", "diagnostics"]);
    assert_eq!(rows.len(), 50);
    let values: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    let limit = PI / 2f64.sqrt();
    assert!((values.last().unwrap() - limit).abs() < 0.05);
}

#[test]
fn sweep_count_steps_at_thresholds() {
    let o = run(&["sweep", "--quantity", "count", "--q", "4", "--T", "0.5:8", "--steps", "76"]);
    assert_eq!(code(&o), 0);
    let (_, rows) = csv_rows(&o);
    let mut prev = 0;
    for r in &rows {
        let t: f64 = r[1].parse().unwrap();
        let c: usize = r[2].parse().unwrap();
        assert!(c >= prev);
        // count is 1 + #{k : k pi / sqrt(2) < T}
        let expected = 1 + (1..).take_while(|&k| k as f64 * PI / 2f64.sqrt() < t).count();
        assert_eq!(c, expected, "T = {t}");
        prev = c;
    }
    assert_eq!(prev, 4);
}

#[test]
fn sweep_records_cell_failures() {
    let o = run(&["sweep", "--quantity", "integral", "--q", "4", "--alpha", "0.2:0.3", "--steps", "3", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["value"].is_number());
    assert!(rows[2]["value"].is_null());
    assert!(rows[2]["diagnostics"].as_str().unwrap().contains("degenerate"));
}

#[test]
fn profile_writes_samples_and_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("p");
    let o = run(&["profile", "--q", "4", "--T", "3.141592653589793", "--grid", "512", "--out", stem.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let inv: Value =
        serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json")).unwrap()).unwrap();
    assert!(inv["period_residual"].as_f64().unwrap() <= 1e-6);
    assert!(inv["virial_residual"].as_f64().unwrap() <= 1e-5);
    assert!(inv["rayleigh_quotient"].as_f64().unwrap() < (2.0 * PI).powf(0.25));
    let mut r = csv::Reader::from_path(stem.with_extension("csv")).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["x", "y"]);
    let ys: Vec<f64> = r.records().map(|x| x.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(ys.len(), 512);
    assert!(ys.iter().all(|&y| y > 0.0));
}

#[test]
fn profile_without_solution_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("p");
    let o = run(&["profile", "--q", "3", "--T", "1", "--out", stem.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}
