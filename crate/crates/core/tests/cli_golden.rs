use std::path::PathBuf;
use std::process::Command;

use chabauty_core::cli::{emit_report, parse_config, run_job, Format, RunReport};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn report(config: &str) -> RunReport {
    let text = std::fs::read_to_string(fixture(config)).unwrap();
    let mut r = run_job(&parse_config(&text).unwrap());
    r.telemetry.elapsed_ms = 0;
    r
}

/// Set `UPDATE_GOLDEN=1` to rewrite the snapshots.
fn check(config: &str, format: Format, golden: &str) {
    let out = emit_report(&report(config), format);
    let path = fixture(golden);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(out, want, "{golden} differs from the current output");
}

#[test]
fn golden_worked_machine() {
    check("worked.json", Format::Machine, "worked.machine.json");
}

#[test]
fn golden_worked_human() {
    check("worked.json", Format::Human, "worked.human.txt");
}

#[test]
fn golden_no_iterations_machine() {
    check("no_iterations.json", Format::Machine, "no_iterations.machine.json");
}

#[test]
fn machine_report_is_deterministic() {
    let a = emit_report(&report("worked.json"), Format::Machine);
    let b = emit_report(&report("worked.json"), Format::Machine);
    assert_eq!(a, b);
}

fn exit_code(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_chabauty")).args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn exit_codes() {
    let worked = fixture("worked.json");
    let worked = worked.to_str().unwrap();
    assert_eq!(exit_code(&["run", worked, "--format", "machine"]), 0);
    assert_eq!(exit_code(&["run", worked, "--max-iter", "0"]), 2);
    assert_eq!(exit_code(&["run", fixture("prime_two.json").to_str().unwrap()]), 1);
    assert_eq!(exit_code(&["run", "/nonexistent/job.json"]), 1);
}

#[test]
fn precision_override_reaches_the_report() {
    let out = Command::new(env!("CARGO_BIN_EXE_chabauty"))
        .args(["run", fixture("worked.json").to_str().unwrap(), "--format", "machine", "--precision", "30"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "complete");
    assert_eq!(v["telemetry"]["final_precision"], 30);
    assert_eq!(v["points"].as_array().unwrap().len(), 10);
}
