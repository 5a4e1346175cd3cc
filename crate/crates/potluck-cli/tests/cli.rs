//! Behavior of the `potluck` binary: exit codes, diagnostics, file outputs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn potluck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_potluck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("potluck-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn no_arguments_prints_usage_and_exits_nonzero() {
    let out = potluck(&[]);
    assert_eq!(out.status.code(), Some(1));
    let text = format!(
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(text.contains("Usage"), "got: {text}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = potluck(&["run", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
}

#[test]
fn help_exits_zero() {
    let out = potluck(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unknown_preset_is_a_runtime_error() {
    let out = potluck(&["run", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error:"), "got: {stderr}");
    assert!(stderr.contains("nope"));
}

#[test]
fn missing_config_file_is_a_runtime_error() {
    let out = potluck(&["run", "--config", "/nonexistent/potluck.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error:"), "got: {stderr}");
    assert_eq!(stderr.lines().count(), 1, "diagnostic must be one line");
}

#[test]
fn invalid_config_names_the_violated_field() {
    let dir = temp_dir("badcfg");
    let config = dir.join("bad.toml");
    std::fs::write(&config, "beta = 1.5\n").unwrap();
    let out = potluck(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("beta"), "got: {stderr}");
}

#[test]
fn oscillate_writes_trace_and_verdict() {
    let dir = temp_dir("oscillate");
    let out = potluck(&[
        "oscillate",
        "--agents",
        "100",
        "--demand",
        "60",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("period=2"));

    let csv = std::fs::read_to_string(dir.join("oscillate_trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 101, "header plus 100 rounds");

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("oscillate_summary.json")).unwrap())
            .unwrap();
    assert_eq!(json["verdict"]["detected"], serde_json::json!(true));
    assert_eq!(json["verdict"]["period"], serde_json::json!(2));
}

#[test]
fn run_from_config_file_writes_both_artifacts() {
    let dir = temp_dir("runcfg");
    let config = dir.join("mini.toml");
    std::fs::write(&config, "n_agents = 5\nn_rounds = 4\nseed = 9\n").unwrap();
    let out = potluck(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("run_trace.csv").exists());
    assert!(dir.join("run_summary.json").exists());
    let csv = std::fs::read_to_string(dir.join("run_trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn format_flag_restricts_outputs() {
    let dir = temp_dir("fmt-csv");
    let out = potluck(&["run", "--preset", "sfbp", "--format", "csv", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.join("run_trace.csv").exists());
    assert!(!dir.join("run_summary.json").exists());

    let dir = temp_dir("fmt-json");
    let out = potluck(&["run", "--preset", "sfbp", "--format", "json", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!dir.join("run_trace.csv").exists());
    assert!(dir.join("run_summary.json").exists());
}

#[test]
fn out_dir_env_variable_is_honored() {
    let dir = temp_dir("envdir");
    let out = Command::new(env!("CARGO_BIN_EXE_potluck"))
        .args(["run", "--preset", "sfbp"])
        .env("POTLUCK_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("run_trace.csv").exists());
}

#[test]
fn compare_summary_carries_the_paired_statistics() {
    let dir = temp_dir("cmp-json");
    let out = potluck(&[
        "compare",
        "--preset",
        "paper",
        "--seed",
        "1",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("compare_summary.json")).unwrap())
            .unwrap();
    let run = &json["runs"][0];
    let outperform = run["outperform_fraction"].as_f64().unwrap();
    let improvement = run["mean_improvement"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&outperform));
    assert!(outperform >= 0.75, "outperform_fraction = {outperform}");
    assert!(improvement > 0.0, "mean_improvement = {improvement}");
    assert!(json["definitions"]["outperform_fraction"].is_string());

    let csv = std::fs::read_to_string(dir.join("compare_trace.csv")).unwrap();
    assert!(csv
        .lines()
        .next()
        .unwrap()
        .contains("supply_weighted_majority"));
    assert_eq!(csv.lines().count(), 1001);
}

#[test]
fn seed_override_changes_the_run() {
    let dir_a = temp_dir("seed-a");
    let dir_b = temp_dir("seed-b");
    potluck(&["run", "--preset", "paper", "--seed", "1", "--out-dir", dir_a.to_str().unwrap()]);
    potluck(&["run", "--preset", "paper", "--seed", "2", "--out-dir", dir_b.to_str().unwrap()]);
    let a = std::fs::read(dir_a.join("run_trace.csv")).unwrap();
    let b = std::fs::read(dir_b.join("run_trace.csv")).unwrap();
    assert_ne!(a, b);
}
