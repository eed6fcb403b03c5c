//! Exit codes, stream separation, and output formats of the binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .display()
        .to_string()
}

fn qloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qloop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn unknown_gate_exits_2() {
    let out = qloop(&["analyze", "--gate", "Q"]);
    assert_eq!(exit_code(&out), 2);
    assert!(out.stdout.is_empty(), "failures must not write data");
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown gate"));
}

#[test]
fn non_unitary_matrix_exits_2() {
    let out = qloop(&["analyze", "--matrix", "[1,1;0,1]"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not unitary"));
}

#[test]
fn malformed_matrix_literal_exits_2() {
    let out = qloop(&["analyze", "--matrix", "[1,1;0"]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line") && stderr.contains("column"));
}

#[test]
fn parse_error_exits_3_with_position() {
    let out = qloop(&["run", &fixture("bad-syntax.scn"), "--mode", "classical"]);
    assert_eq!(exit_code(&out), 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
    assert!(stderr.contains("column"), "stderr: {stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn validation_error_exits_4() {
    let out = qloop(&["run", &fixture("bad-validation.scn"), "--mode", "classical"]);
    assert_eq!(exit_code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown gate name \"Q\""));
}

#[test]
fn missing_file_exits_1() {
    let out = qloop(&["run", "/nonexistent/never.scn", "--mode", "classical"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn unknown_pipeline_gate_exits_2() {
    let out = qloop(&["merge", "0", "1", "--pipeline", "D,Q"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown gate"));
}

#[test]
fn warnings_go_to_stderr_data_to_stdout() {
    let out = qloop(&[
        "run",
        &fixture("warn-angle.scn"),
        "--mode",
        "quantum",
        "--seed",
        "1",
    ]);
    assert_eq!(exit_code(&out), 0);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("imperfect correlation"), "stderr: {stderr}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let parsed: serde_json::Value = serde_json::from_str(stdout.trim()).expect("stdout is JSON");
    assert_eq!(parsed["result"]["mode"], "quantum");
}

#[test]
fn run_quantum_reports_histogram_and_fixed_point() {
    let out = qloop(&[
        "run",
        &scenario("fig2.scn"),
        "--mode",
        "quantum",
        "--seed",
        "42",
        "--shots",
        "100000",
    ]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(value["manifest"]["seed"], 42);
    assert_eq!(value["manifest"]["shots"], 100000);
    let plus = value["result"]["outcome_histogram"]["plus"]
        .as_u64()
        .unwrap();
    let minus = value["result"]["outcome_histogram"]["minus"]
        .as_u64()
        .unwrap();
    assert_eq!(plus + minus, 100_000);
    assert!((49_500..=50_500).contains(&plus));
    let amp = value["result"]["fixed_point_used"][0][0].as_f64().unwrap();
    assert!((amp - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
}

#[test]
fn analyze_identity_is_consistent_classically() {
    let out = qloop(&["analyze", "--gate", "ID"]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["result"]["classification"], "consistent-classically");
    assert_eq!(value["result"]["classical_fixed_points"][0], "0");
    assert_eq!(value["result"]["classical_fixed_points"][1], "1");
}

#[test]
fn merge_equal_bits_passes_through() {
    let out = qloop(&["merge", "1", "1", "--resolutions", "100", "--seed", "5"]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["result"]["merged"]["kind"], "cbit");
    assert_eq!(value["result"]["merged"]["value"], 1);
    assert_eq!(value["result"]["histogram"]["one"], 100);
    assert_eq!(value["result"]["histogram"]["zero"], 0);
}

#[test]
fn merge_pipeline_keeps_the_fixed_point() {
    let bare = qloop(&["merge", "0", "1", "--resolutions", "1000", "--seed", "9"]);
    let piped = qloop(&[
        "merge",
        "0",
        "1",
        "--pipeline",
        "D",
        "--resolutions",
        "1000",
        "--seed",
        "9",
    ]);
    let bare: serde_json::Value = serde_json::from_slice(&bare.stdout).unwrap();
    let piped: serde_json::Value = serde_json::from_slice(&piped.stdout).unwrap();
    assert_eq!(
        bare["result"]["merged"]["amplitudes"], piped["result"]["processed"]["amplitudes"],
        "flip must leave the merged state unchanged"
    );
    assert_eq!(bare["result"]["histogram"], piped["result"]["histogram"]);
}

#[test]
fn correlate_accepts_pi_and_decimals() {
    let out = qloop(&["correlate", "0", "pi", "--shots", "1000", "--seed", "2"]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["result"]["analytic"].as_f64().unwrap(), 1.0);

    let out = qloop(&["correlate", "0", "0", "--shots", "1000"]);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["result"]["analytic"].as_f64().unwrap(), -1.0);

    let out = qloop(&["correlate", "0", "banana"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn parse_check_prints_canonical_form_with_defaults() {
    let out = qloop(&["parse-check", &scenario("fig1.scn")]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["result"]["valid"], true);
    assert_eq!(value["result"]["telegraphs"], 1);
    let canonical = value["result"]["canonical"].as_str().unwrap();
    assert!(canonical.contains("shots 10000"));
    assert!(canonical.contains("mirror M gate ID"));
    assert!(canonical.contains("order tS < tB < tA"));
}

#[test]
fn csv_format_emits_flat_rows() {
    let out = qloop(&[
        "correlate",
        "0",
        "pi",
        "--shots",
        "1000",
        "--seed",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("key,value"));
    assert!(text.contains("manifest.seed,4"));
    assert!(text.contains("result.analytic,1"));
    assert!(text.contains("result.counts.plus_minus,0"));
}
