//! Drives the installed binary end to end: artifact writing, seed
//! overrides, sweep tables, the verify suites with and without an
//! injected fault, and the exit-code convention (0 success, 1 failed
//! checks, 2 usage errors). The built-in scenario configs are also pinned
//! against golden JSON echoes so they cannot drift silently.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shardsim"))
}

fn fresh_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("shardsim-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

const MINI_SCENARIO: &str = r#"
schema_version = 1
name = "mini"
seed = 1
shards = 4
slots = 200
blocks_target = 2
amount = 10.0
k_max = 2
generation = "round-shuffle"

[topology]
kind = "path"
agents = 10

[pricing]
p0 = 0.0
p_max = 1.0
alpha = 0.001

[policy]
kind = "best-response"

[balances]
mode = "staggered"
amount = 1e6
"#;

#[test]
fn run_writes_self_describing_artifacts() {
    let out = fresh_dir("run");
    let output = bin().args(["run", "--preset", "fig2", "--out"]).arg(&out).output().unwrap();
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("fig2 seed 2"), "summary line missing: {text}");
    assert!(text.contains("38 edges"), "summary line missing edge count: {text}");

    let csv = std::fs::read_to_string(out.join("fig2-seed2.trace.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "tx_index,shard_usage_0,shard_usage_1,shard_usage_2,shard_usage_3,\
         loading_sum,mean_cardinality,fee,accepted,block_index,request_spread"
    );

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("fig2-seed2.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["seed"], 2);
    assert_eq!(summary["network"]["edges"], 38);
    assert_eq!(summary["blocks"].as_array().unwrap().len(), 5);
    let golden: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(golden_path("fig2")).unwrap()).unwrap();
    assert_eq!(summary["scenario"], golden, "artifact config echo drifted from the frozen form");
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn preset_json_echoes_match_goldens() {
    for name in shardsim::cli::PRESET_NAMES {
        let echo = serde_json::to_value(shardsim::cli::preset(name).unwrap()).unwrap();
        let path = golden_path(name);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            let mut text = serde_json::to_string_pretty(&echo).unwrap();
            text.push('\n');
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, text).unwrap();
            continue;
        }
        let golden: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| {
                panic!("missing golden echo {}: {e}; run with UPDATE_GOLDEN=1", path.display())
            }))
            .unwrap();
        assert_eq!(echo, golden, "builtin scenario {name} drifted from its golden echo");
    }
}

#[test]
fn seed_override_renames_and_reseeds_artifacts() {
    let out = fresh_dir("seed");
    let output = bin()
        .args(["run", "--preset", "fig3", "--seed", "9", "--format", "json", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    assert!(!out.join("fig3-seed9.trace.csv").exists(), "csv written despite --format json");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("fig3-seed9.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["seed"], 9);
    assert_eq!(summary["scenario"]["seed"], 9);
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn scenario_files_run_like_presets() {
    let out = fresh_dir("file");
    let path = out.join("mini.toml");
    std::fs::write(&path, MINI_SCENARIO).unwrap();
    let output = bin().args(["run", "--scenario"]).arg(&path).arg("--out").arg(&out).output().unwrap();
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("mini seed 1"));
    assert!(out.join("mini-seed1.trace.csv").exists());
    assert!(out.join("mini-seed1.summary.json").exists());
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn missing_scenario_file_is_a_usage_error() {
    let output =
        bin().args(["run", "--scenario", "/no/such/scenario.toml"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("cannot load scenario"));
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let output = bin().args(["run", "--preset", "fig7"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let text = stderr(&output);
    assert!(text.contains("unknown preset") && text.contains("fig2"), "stderr: {text}");
}

#[test]
fn sweep_emits_a_row_per_value_seed_pair() {
    let out = fresh_dir("sweep");
    let path = out.join("mini.toml");
    std::fs::write(&path, MINI_SCENARIO).unwrap();
    let output = bin()
        .args(["sweep", "--scenario"])
        .arg(&path)
        .args(["--param", "alpha", "--values", "0,0.001", "--seeds", "1,2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let table = std::fs::read_to_string(out.join("mini-sweep-alpha.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "value,seed,final_efficiency,total_transactions");
    assert_eq!(lines.len(), 1 + 2 * 2, "one row per (value, seed) pair");
    assert!(lines[1].starts_with("0,1,") && lines[4].starts_with("0.001,2,"));
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn sweep_rejects_unknown_parameters() {
    let out = fresh_dir("sweep-bad");
    let path = out.join("mini.toml");
    std::fs::write(&path, MINI_SCENARIO).unwrap();
    let output = bin()
        .args(["sweep", "--scenario"])
        .arg(&path)
        .args(["--param", "rho", "--values", "1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("unknown sweep parameter"));
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn sweep_requires_a_value_list() {
    let output = bin().args(["sweep", "--preset", "fig2", "--param", "alpha"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "clap usage errors exit with 2");
}

#[test]
fn verify_reports_each_property_suite() {
    let output = bin().arg("verify").output().unwrap();
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    for suite in [
        "potential step identity",
        "best-response vertex optimality",
        "monotone best-response convergence",
        "pricing and metric consistency",
    ] {
        assert!(text.contains(&format!("PASS {suite}")), "missing PASS line for {suite}: {text}");
    }
    assert!(!text.contains("FAIL"), "unexpected failure: {text}");
}

#[test]
fn injected_fault_fails_verification() {
    let output = bin().args(["verify", "--fault-inject"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1), "fault injection must fail the check");
    assert!(stdout(&output).contains("FAIL potential step identity"));
}
