//! End-to-end tests of the `qsl` binary: output schemas, reproducibility,
//! caching, configuration precedence, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

static DIR_COUNTER: AtomicUsize = AtomicUsize::new(0);

fn fresh_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "qsl-cli-test-{tag}-{}-{}",
        std::process::id(),
        DIR_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# config_hash="), "bad header: {header}");
    assert!(header.contains(" seed="));
    assert!(header.contains(" version="));
    lines.next().unwrap();
    lines.collect()
}

#[test]
fn echo_reruns_are_byte_identical() {
    let a = fresh_dir("echo-a");
    let b = fresh_dir("echo-b");
    let args = [
        "echo",
        "--n",
        "40",
        "--delta-i",
        "100",
        "--delta-f",
        "1.5",
        "--selector",
        "ground",
        "--t-max",
        "10",
    ];
    run_ok(&[&args[..], &["--out-dir", a.to_str().unwrap()]].concat());
    run_ok(&[&args[..], &["--out-dir", b.to_str().unwrap()]].concat());
    assert_eq!(read(&a, "echo.csv"), read(&b, "echo.csv"));
    assert_eq!(read(&a, "echo_zeros.csv"), read(&b, "echo_zeros.csv"));
}

#[test]
fn spectrum_cache_serves_the_second_run_unchanged() {
    let dir = fresh_dir("spectrum");
    let args = [
        "spectrum",
        "--n",
        "40",
        "--delta",
        "2",
        "--out-dir",
        dir.to_str().unwrap(),
    ];
    let first = run_ok(&args);
    let csv_first = read(&dir, "spectrum.csv");
    let second = run_ok(&args);
    let csv_second = read(&dir, "spectrum.csv");

    assert!(String::from_utf8_lossy(&first.stdout).contains("from solver"));
    assert!(String::from_utf8_lossy(&second.stdout).contains("from cache"));
    assert_eq!(csv_first, csv_second);
    assert_eq!(data_lines(&csv_first).len(), 40);
}

#[test]
fn sweep_states_covers_every_initial_state() {
    let dir = fresh_dir("states");
    run_ok(&[
        "qsl-sweep",
        "--mode",
        "states",
        "--n",
        "30",
        "--delta-i",
        "1000",
        "--delta-f",
        "0",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    let rows = read(&dir, "qsl_states.csv");
    let rows = data_lines(&rows);
    assert_eq!(rows.len(), 30);
    // Release onto the bare chain leaves the uncertainty bound operative
    // for every localized initial state.
    for row in rows {
        assert!(row.ends_with(",MT"), "unexpected row {row}");
    }
}

#[test]
fn sweep_curve_tracks_the_requested_grid() {
    let dir = fresh_dir("curve");
    run_ok(&[
        "qsl-sweep",
        "--mode",
        "curve",
        "--n",
        "30",
        "--delta-i",
        "1000",
        "--grid-start",
        "1",
        "--grid-stop",
        "4",
        "--grid-points",
        "4",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    let text = read(&dir, "qsl_curve.csv");
    let rows = data_lines(&text);
    assert_eq!(rows.len(), 4);
    let deltas: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(deltas, vec![1.0, 2.0, 3.0, 4.0]);
    for row in rows {
        let tau: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!(tau > 0.0);
    }
}

#[test]
fn transition_locates_the_quasiperiodic_critical_coupling() {
    let dir = fresh_dir("transition");
    run_ok(&[
        "transition",
        "--n",
        "80",
        "--grid-start",
        "1",
        "--grid-stop",
        "3",
        "--grid-points",
        "5",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&read(&dir, "transition.json")).unwrap();
    let delta_c = report["delta_c"].as_f64().unwrap();
    assert!((delta_c - 2.0).abs() < 0.1, "delta_c {delta_c}");
    assert_eq!(report["analytic"].as_f64().unwrap(), 2.0);
    assert_eq!(report["model"], "aubry-andre");
    assert!(report["v"].is_null());
    assert!(report["n_phases"].is_null());
    let lo = report["bracket"][0].as_f64().unwrap();
    let hi = report["bracket"][1].as_f64().unwrap();
    assert!(lo <= delta_c && delta_c <= hi);
    assert!(!report["config_hash"].as_str().unwrap().is_empty());
}

#[test]
fn interacting_transition_reports_its_averaging_parameters() {
    let dir = fresh_dir("mbl-transition");
    run_ok(&[
        "transition",
        "--model",
        "interacting",
        "--n",
        "8",
        "--v",
        "2",
        "--n-phases",
        "2",
        "--grid-start",
        "0.5",
        "--grid-stop",
        "5",
        "--grid-points",
        "5",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&read(&dir, "transition.json")).unwrap();
    assert!(report["analytic"].is_null());
    assert_eq!(report["v"].as_f64().unwrap(), 2.0);
    assert_eq!(report["n_phases"].as_u64().unwrap(), 2);
    assert_eq!(report["selector"], "ground");
    let delta_c = report["delta_c"].as_f64().unwrap();
    assert!((0.5..=5.0).contains(&delta_c));
}

#[test]
fn mbl_scan_writes_matching_table_and_summary() {
    let dir = fresh_dir("mbl-scan");
    run_ok(&[
        "mbl-scan",
        "--n",
        "8",
        "--v",
        "2",
        "--n-phases",
        "2",
        "--grid-start",
        "0.5",
        "--grid-stop",
        "4",
        "--grid-points",
        "3",
        "--seed",
        "7",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    let table = read(&dir, "mbl_scan.csv");
    let rows = data_lines(&table);
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let n_real: usize = row.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(n_real, 2);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir, "mbl_scan.json")).unwrap();
    assert_eq!(summary["seed"].as_u64().unwrap(), 7);
    let peak = summary["peak_mean_r"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&peak));
    let hash = summary["config_hash"].as_str().unwrap();
    assert!(table.contains(hash), "summary and table hashes differ");
}

#[test]
fn oracle_check_passes_at_shipped_tolerances() {
    let dir = fresh_dir("oracle-pass");
    let out = run_ok(&["oracle-check", "--out-dir", dir.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all checks passed"));
    let rows = read(&dir, "oracle_check.csv");
    for row in data_lines(&rows) {
        assert!(row.ends_with(",pass"), "failing row {row}");
    }
}

#[test]
fn oracle_check_exits_with_two_on_breach() {
    let dir = fresh_dir("oracle-breach");
    let cfg = dir.join("tight.cfg");
    std::fs::write(&cfg, "tolerance-scale=1e-12\n").unwrap();
    let out = run(&[
        "oracle-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("BREACH"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = fresh_dir("precedence");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "n=40\ndelta-i=1000\ndelta-f=0\n").unwrap();
    run_ok(&[
        "qsl-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "30",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    let rows = read(&dir, "qsl_states.csv");
    assert_eq!(data_lines(&rows).len(), 30);
}

#[test]
fn unknown_model_fails_with_a_named_error() {
    let out = run(&["spectrum", "--model", "xyz"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown single-particle model"));
}

#[test]
fn missing_required_parameter_names_the_key() {
    let dir = fresh_dir("missing");
    let out = run(&["qsl-sweep", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta-i"));
}
