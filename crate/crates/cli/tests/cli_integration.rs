//! End-to-end checks of the batch front end: exit codes, report files and
//! output determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_substatic"))
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

const CATALOGUE: &str = r#"{
  "models": [
    {"name": "SCHW3", "n": 3, "c_cross": 1.0, "c_pot": 1.0, "kind": "closed_form", "lambda": 0.0, "m": 0.5, "s_max": 3.0},
    {"name": "ADS0", "n": 3, "c_cross": -1.0, "c_pot": -1.0, "kind": "closed_form", "lambda": -1.0, "m": 0.0, "s_max": 3.0}
  ]
}"#;

#[test]
fn hk_scenario_passes_with_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("hk.json");
    write(
        &config,
        r#"{"name": "schw3_sphere", "model": "SCHW3", "task": "hk_deficit", "params": {"s_hat": 2.0}}"#,
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("schw3_sphere.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["pass"], true);
    let deficit = summary["report"]["deficit"].as_f64().unwrap();
    assert!(deficit.abs() < 1e-9, "deficit {deficit}");
    let csv = fs::read_to_string(out.join("schw3_sphere.graph.csv")).unwrap();
    assert!(csv.starts_with("theta,u\n"));
}

#[test]
fn substatic_scenario_reports_h4() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sc.json");
    write(
        &config,
        r#"{"name": "ads0_check", "model": "ADS0", "task": "substatic_check"}"#,
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("ads0_check.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["report"]["h4"], false);
    assert_eq!(summary["report"]["substatic"], true);
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    // Missing the model field entirely.
    write(&config, r#"{"name": "broken", "task": "hk_deficit"}"#);
    let status = bin()
        .args(["run", config.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Unknown field.
    write(
        &config,
        r#"{"name": "broken", "model": "SCHW3", "task": "hk_deficit", "bogus": 1}"#,
    );
    let status = bin()
        .args(["run", config.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Out-of-domain radius is an input error as well.
    write(
        &config,
        r#"{"name": "broken", "model": "SCHW3", "task": "hk_deficit", "params": {"s_hat": 9.0}}"#,
    );
    let status = bin()
        .args(["run", config.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn suite_over_catalogue_passes() {
    let dir = tempfile::tempdir().unwrap();
    let catalogue = dir.path().join("catalogue.json");
    write(&catalogue, CATALOGUE);
    let out = dir.path().join("out");
    let output = bin()
        .args([
            "suite",
            catalogue.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--workers",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stdout));
    let table = String::from_utf8_lossy(&output.stdout);
    assert!(table.contains("substatic_check"));
    assert!(table.contains("torsion"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("suite.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["rows"].as_array().unwrap().len(), 10);
}

#[test]
fn suite_flags_non_substatic_model_and_skips_rest() {
    let dir = tempfile::tempdir().unwrap();
    let catalogue = dir.path().join("catalogue.json");
    // Tabulated profile of a concave eta = -t^2 classification function on
    // [1, 3]: fails the substatic gate.
    let mut samples = String::new();
    for i in 0..=400 {
        let s: f64 = 1.0 + 2.0 * i as f64 / 400.0;
        let t = s.powi(-3);
        let w = 2.0 + s * s * (-t * t);
        if i > 0 {
            samples.push(',');
        }
        samples.push_str(&format!("[{s:.12},{:.12}]", w.sqrt()));
    }
    write(
        &catalogue,
        &format!(
            r#"{{"models": [
  {{"name": "SCHW3", "n": 3, "c_cross": 1.0, "c_pot": 1.0, "kind": "closed_form", "lambda": 0.0, "m": 0.5, "s_max": 3.0}},
  {{"name": "CONCAVE", "n": 3, "c_cross": 2.0, "c_pot": 2.0, "kind": "tabulated", "samples": [{samples}], "s_max": 3.0}}
]}}"#
        ),
    );
    let out = dir.path().join("out");
    let output = bin()
        .args(["suite", catalogue.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let table = String::from_utf8_lossy(&output.stdout);
    let concave_fail = table
        .lines()
        .any(|l| l.contains("CONCAVE") && l.contains("substatic_check") && l.contains("fail"));
    assert!(concave_fail, "{table}");
    let skipped = table
        .lines()
        .filter(|l| l.contains("CONCAVE") && l.contains("skipped"))
        .count();
    assert_eq!(skipped, 4, "{table}");
    // The healthy model still runs fully.
    assert!(table
        .lines()
        .any(|l| l.contains("SCHW3") && l.contains("torsion") && l.contains("pass")));
}

#[test]
fn empty_catalogue_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let catalogue = dir.path().join("catalogue.json");
    write(&catalogue, r#"{"models": []}"#);
    let status = bin()
        .args(["suite", catalogue.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn identical_configs_produce_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("flow.json");
    write(
        &config,
        r#"{"name": "flow_det", "model": "SCHW3", "task": "flow",
            "params": {"s_hat": 2.0, "t_end": 0.05, "dt": 0.005, "nodes": 32,
                       "perturbation": {"amplitude": 0.05, "mode": 2}}}"#,
    );
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = fs::read(out_a.join("flow_det.trace.csv")).unwrap();
    let b = fs::read(out_b.join("flow_det.trace.csv")).unwrap();
    assert_eq!(a, b, "trace CSV must be byte-identical");
}

#[test]
fn flow_config_accepts_initial_graph_nesting() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("flow.json");
    write(
        &config,
        r#"{"name": "flow_nested", "model": "SCHW3", "task": "flow",
            "params": {"t_end": 0.05, "dt": 0.005, "nodes": 32,
                       "initial_graph": {"s_hat": 2.0,
                                         "perturbation": {"amplitude": 0.05, "mode": 2}}}}"#,
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("flow_nested.trace.csv").exists());
}

#[test]
fn torsion_scenario_reports_horizon_slope() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("torsion.json");
    write(
        &config,
        r#"{"name": "schw3_torsion", "model": "SCHW3", "task": "torsion", "params": {"s_hat": 2.0, "grid": 96}}"#,
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("schw3_torsion.summary.json")).unwrap())
            .unwrap();
    let slope = summary["horizon_slope"].as_f64().unwrap();
    assert!((slope + 2.0).abs() < 1e-6, "slope {slope}");
    let csv = fs::read_to_string(out.join("schw3_torsion.solution.csv")).unwrap();
    assert!(csv.starts_with("s,u,du_ds,residual\n"));
}
