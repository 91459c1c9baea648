//! End-to-end tests of the `ssd` binary: exit codes, file outputs, and the
//! manifest contract.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ssd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssd"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn small_design_args<'a>(out: &'a str) -> Vec<&'a str> {
    vec![
        "design", "--out", out, "--seed", "3", "--set", "m=5", "--set", "n=10", "--set",
        "l=12", "--set", "kappa=3", "--set", "max_iters=40",
    ]
}

#[test]
fn design_writes_phi_trace_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = ssd(&small_design_args("run"), dir.path());
    assert!(out.status.success(), "{out:?}");
    let run = dir.path().join("run");
    let trace = fs::read_to_string(run.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 41); // header + max_iters rows
    assert!(trace.starts_with("iter,f,d_phi,d_g,eta,halvings"));
    let phi = fs::read_to_string(run.join("phi.csv")).unwrap();
    assert_eq!(phi.lines().count(), 5);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "design");
    assert_eq!(manifest["status"], "ok");
    // defaults that were not overridden must be listed
    let defaults: Vec<String> = manifest["defaults_applied"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert!(defaults.contains(&"lambda".to_string()));
    assert!(defaults.contains(&"xi".to_string()));
    assert!(!defaults.contains(&"m".to_string()));
}

#[test]
fn design_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ssd(&small_design_args("a"), dir.path()).status.success());
    assert!(ssd(&small_design_args("b"), dir.path()).status.success());
    assert_eq!(
        fs::read(dir.path().join("a/phi.csv")).unwrap(),
        fs::read(dir.path().join("b/phi.csv")).unwrap()
    );
}

#[test]
fn invalid_config_exits_2_naming_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = ssd(
        &["design", "--out", "x", "--set", "gamma=1.5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("gamma"), "stderr: {stderr}");
}

#[test]
fn unknown_system_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = ssd(
        &["benchmark", "--out", "x", "--set", "systems=randn,flux"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("flux"));
}

#[test]
fn env_override_applies() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ssd"))
        .args(["design", "--out", "e", "--set", "n=10", "--set", "l=12", "--set", "kappa=3", "--set", "max_iters=5"])
        .env("SSD_M", "4")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let phi = fs::read_to_string(dir.path().join("e/phi.csv")).unwrap();
    assert_eq!(phi.lines().count(), 4);
}

#[test]
fn diagnose_pipeline_and_injected_violation() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ssd(&small_design_args("run"), dir.path()).status.success());
    let trace_path = dir.path().join("run/trace.csv");
    let out = ssd(
        &["diagnose", "--trace", "run/trace.csv", "--out", "diag"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    // corrupt one f value upward
    let mut lines: Vec<String> = fs::read_to_string(&trace_path)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    let mut fields: Vec<String> = lines[10].split(',').map(String::from).collect();
    fields[1] = "9.9e9".into();
    lines[10] = fields.join(",");
    fs::write(dir.path().join("bad.csv"), lines.join("\n")).unwrap();
    let out = ssd(
        &["diagnose", "--trace", "bad.csv", "--out", "diag2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("iteration 10"));

    // malformed CSV
    fs::write(dir.path().join("junk.csv"), "not,a,trace\n1,2\n").unwrap();
    let out = ssd(
        &["diagnose", "--trace", "junk.csv", "--out", "diag3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_trace_diagnoses_vacuously() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.csv"), "iter,f,d_phi,d_g,eta,halvings\n").unwrap();
    let out = ssd(
        &["diagnose", "--trace", "empty.csv", "--out", "d"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn sweep_row_count_and_manifest_sampler() {
    let dir = tempfile::tempdir().unwrap();
    let out = ssd(
        &[
            "sweep", "--out", "s", "--seed", "1", "--set", "m=5", "--set", "n=10", "--set",
            "l=12", "--set", "k=2", "--set", "kappa=3", "--set", "j=20", "--set",
            "design_iters=20", "--set", "systems=randn,bispar", "--set", "axis=snr",
            "--set", "values=10,20",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let report = fs::read_to_string(dir.path().join("s/report.csv")).unwrap();
    assert_eq!(report.lines().count(), 5); // header + 2 systems x 2 values
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["support_sampler"], "uniform-without-replacement");
}

#[test]
fn manifest_written_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    // dict file that does not exist -> runtime error after config resolution
    let out = ssd(
        &["design", "--out", "f", "--set", "dict_path=missing.csv"],
        dir.path(),
    );
    assert_ne!(out.status.code(), Some(0));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("f/manifest.json")).unwrap())
            .unwrap();
    assert!(manifest["status"].as_str().unwrap().starts_with("error"));
}

#[test]
fn binary_phi_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = small_design_args("bin");
    args.push("--binary");
    assert!(ssd(&args, dir.path()).status.success());
    let bytes = fs::read(dir.path().join("bin/phi.ssmx")).unwrap();
    assert_eq!(&bytes[..4], b"SSMX");
    let m = ssd::matrix::DenseMatrix::read_binary(&bytes[..]).unwrap();
    assert_eq!((m.rows(), m.cols()), (5, 10));
}
