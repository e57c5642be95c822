//! End-to-end checks of the command-line surface: exit codes, CSV
//! shapes, config-file precedence, and byte-exact reruns.

use std::path::Path;
use std::process::{Command, Output};

fn barrierlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barrierlab"))
        .args(args)
        .output()
        .expect("spawn barrierlab")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn unknown_geometry_is_a_usage_error() {
    let out = barrierlab(&["verify-geometry", "--geometry", "frustum", "--dim", "3"]);
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("frustum"), "stderr names the bad geometry: {msg}");
}

#[test]
fn missing_dim_is_a_usage_error() {
    let out = barrierlab(&["verify-geometry", "--geometry", "orthant"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--dim"));
}

#[test]
fn lorentz_theorems_reject_other_temperatures() {
    let out = barrierlab(&[
        "verify-theorems",
        "--geometry",
        "lorentz",
        "--dim",
        "4",
        "--beta",
        "1",
    ]);
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("beta = 2"), "stderr cites the required temperature: {msg}");
}

#[test]
fn cube_certificate_skips_cone_checks() {
    let out = barrierlab(&[
        "verify-geometry",
        "--geometry",
        "cube",
        "--dim",
        "2",
        "--points",
        "10",
        "--seed",
        "11",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    let checks = doc["result"]["checks"].as_array().unwrap();
    let skipped = checks
        .iter()
        .filter(|c| c["status"] == "skipped")
        .count();
    assert_eq!(skipped, 4, "cube is not a cone; the four cone identities are skipped");
    assert_eq!(doc["result"]["verdict"], true);
}

#[test]
fn simulate_csv_has_replicas_by_steps_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("paths.csv");
    let out = barrierlab(&[
        "simulate",
        "--geometry",
        "orthant",
        "--dim",
        "2",
        "--dt",
        "0.01",
        "--horizon",
        "0.1",
        "--replicas",
        "5",
        "--seed",
        "3",
        "--no-timestamp",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("replica,step,time,x0,x1"));
    // 5 replicas x (10 steps + 1 initial state)
    assert_eq!(lines.count(), 5 * 11);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["rows"], 55);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "geometry = orthant\ndim = 1\nreplicas = 4\ndt = 0.01\nhorizon = 0.05\nseed = 9\n",
    )
    .unwrap();
    let csv = dir.path().join("paths.csv");
    let out = barrierlab(&[
        "simulate",
        "--config",
        conf.to_str().unwrap(),
        "--replicas",
        "2",
        "--no-timestamp",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    // flag overrides config: 2 replicas x (5 steps + 1), plus header
    assert_eq!(text.lines().count(), 1 + 2 * 6);
}

#[test]
fn gibbs_csv_schema_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("hist.csv");
    let out = barrierlab(&[
        "gibbs",
        "--geometry",
        "cube",
        "--dim",
        "1",
        "--beta",
        "1",
        "--energy",
        "barrier:alpha=2",
        "--dt",
        "0.001",
        "--horizon",
        "2",
        "--replicas",
        "256",
        "--seed",
        "5",
        "--bins",
        "10",
        "--no-timestamp",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bin_lo,bin_hi,count,empirical,target"));
    assert_eq!(lines.count(), 10);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["report"]["verdict"], true);
}

#[test]
fn gibbs_without_energy_fails_as_non_normalizable() {
    let out = barrierlab(&[
        "gibbs",
        "--geometry",
        "cube",
        "--dim",
        "1",
        "--dt",
        "0.001",
        "--horizon",
        "0.5",
        "--replicas",
        "64",
        "--seed",
        "5",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 1, "divergent target is a computational failure, not usage");
    assert!(String::from_utf8_lossy(&out.stderr).contains("not normalizable"));
}

#[test]
fn central_path_matches_closed_form_objective() {
    let out = barrierlab(&[
        "central-path",
        "--geometry",
        "orthant",
        "--dim",
        "3",
        "--cost",
        "1,2,4",
        "--theta-max",
        "1024",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    let objective = doc["result"]["final_objective"].as_f64().unwrap();
    assert!((objective - 3.0 / 1024.0).abs() < 1e-10);
}

#[test]
fn exact_scheme_guards() {
    let out = barrierlab(&[
        "simulate",
        "--geometry",
        "lorentz",
        "--dim",
        "3",
        "--scheme",
        "exact",
        "--dt",
        "0.01",
        "--horizon",
        "0.05",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 2);
    let out = barrierlab(&[
        "simulate",
        "--geometry",
        "orthant",
        "--dim",
        "1",
        "--scheme",
        "exact",
        "--energy",
        "linear:c=1",
        "--dt",
        "0.01",
        "--horizon",
        "0.05",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn plot_data_requires_out() {
    let out = barrierlab(&[
        "simulate",
        "--geometry",
        "orthant",
        "--dim",
        "1",
        "--dt",
        "0.01",
        "--horizon",
        "0.05",
        "--plot-data",
        "--no-timestamp",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));
}

#[test]
fn plot_data_writes_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("stages.csv");
    let out = barrierlab(&[
        "central-path",
        "--geometry",
        "orthant",
        "--dim",
        "2",
        "--cost",
        "1,1",
        "--theta-max",
        "4",
        "--no-timestamp",
        "--plot-data",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let plot = std::fs::read_to_string(dir.path().join("stages.plot")).unwrap();
    let mut lines = plot.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    for line in lines {
        assert_eq!(line.split_whitespace().count(), 2, "two columns per row: {line}");
    }
}

#[test]
fn reruns_are_byte_identical_without_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    // Same destination both times: the JSON envelope echoes the CSV path.
    let csv = dir.path().join("paths.csv");
    let run = || -> (Vec<u8>, Vec<u8>) {
        let out = barrierlab(&[
            "simulate",
            "--geometry",
            "cube",
            "--dim",
            "2",
            "--dt",
            "0.01",
            "--horizon",
            "0.2",
            "--replicas",
            "4",
            "--seed",
            "77",
            "--no-timestamp",
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        (std::fs::read(&csv).unwrap(), out.stdout.clone())
    };
    let (csv_a, json_a) = run();
    let (csv_b, json_b) = run();
    assert_eq!(csv_a, csv_b, "CSV bytes differ between identical runs");
    assert_eq!(json_a, json_b, "JSON bytes differ between identical runs");
}

#[test]
fn timestamp_present_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let out = barrierlab(&[
        "simulate",
        "--geometry",
        "orthant",
        "--dim",
        "1",
        "--dt",
        "0.01",
        "--horizon",
        "0.02",
        "--replicas",
        "1",
        "--seed",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert!(doc["timestamp"].is_u64());
    assert!(Path::new(csv.to_str().unwrap()).exists());
}
