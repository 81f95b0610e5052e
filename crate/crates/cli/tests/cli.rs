//! End-to-end tests of the binary: fixture generation, stage runs, exit
//! codes, and the JSON error surface.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperrole"))
}

fn synth_fixture(dir: &Path, extra: &[&str]) {
    let mut cmd = bin();
    cmd.args([
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--users",
        "30",
        "--months",
        "3",
        "--threads-per-month",
        "20",
        "--seed",
        "11",
        "--emit-config",
    ]);
    cmd.args(extra);
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "synth failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn synth_then_full_run() {
    let dir = tempfile::tempdir().unwrap();
    synth_fixture(dir.path(), &["--with-texts"]);
    assert!(dir.path().join("threads.csv").exists());
    assert!(dir.path().join("config.json").exists());

    let out_dir = dir.path().join("out");
    let out = bin()
        .args([
            "run",
            "--config",
            dir.path().join("config.json").to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "run failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "stats.csv",
        "distributions.csv",
        "archetype_census.csv",
        "profiles.csv",
        "transitions.csv",
        "central_discussions.csv",
        "coverage.csv",
        "run_metadata.json",
    ] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
}

#[test]
fn single_stage_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    synth_fixture(dir.path(), &[]);
    let out_dir = dir.path().join("stats-only");
    let out = bin()
        .args([
            "stats",
            "--config",
            dir.path().join("config.json").to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out_dir.join("stats.csv").exists());
    assert!(!out_dir.join("transitions.csv").exists());
}

#[test]
fn missing_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            "--config",
            dir.path().join("absent.json").to_str().unwrap(),
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_errors_flag_emits_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            "--json-errors",
            "--config",
            dir.path().join("absent.json").to_str().unwrap(),
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(parsed["exit_code"], 2);
    assert!(parsed["error"].is_string());
}

#[test]
fn infeasible_synth_spec_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "synth",
            "--out",
            dir.path().to_str().unwrap(),
            "--users",
            "5",
            "--size-min",
            "3",
            "--size-max",
            "10",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn month_filter_restricts_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    synth_fixture(dir.path(), &[]);
    let out_dir = dir.path().join("filtered");
    let out = bin()
        .args([
            "stats",
            "--config",
            dir.path().join("config.json").to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--months",
            "2023-01,2023-02",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stats = std::fs::read_to_string(out_dir.join("stats.csv")).unwrap();
    // header + two monthly rows + aggregate
    assert_eq!(stats.lines().count(), 4);
}
