use std::fs;

use rtqm_harness::export::{export, Table};
use rtqm_harness::{run, Format, RunStatus, ScenarioConfig, ScenarioKind};

fn read(dir: &std::path::Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn efficiency_sweep_is_independent_of_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut config = ScenarioConfig::new(ScenarioKind::EfficiencySweep).with_grid(-4.0e8, 4.0e8, 2.0e8);
    config.jobs = 1;
    let m1 = run(&config, a.path(), Format::Csv).unwrap();
    config.jobs = 8;
    let m8 = run(&config, b.path(), Format::Csv).unwrap();
    let name = "efficiency-sweep.csv";
    assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    assert_eq!(m1.summary, m8.summary);

    let csv = read(a.path(), name);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "delta[Hz],eta_cold[1],eta_rt[arb],t_rt[1],eta_rt_t_rt[arb]");
    assert_eq!(lines.len(), 6);
    let deltas: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(deltas, [-4.0e8, -2.0e8, 0.0, 2.0e8, 4.0e8]);
}

#[test]
fn single_point_grid_gives_header_and_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let config = ScenarioConfig::new(ScenarioKind::EfficiencySweep).with_grid(0.0, 1.0e6, 1.0e7);
    let manifest = run(&config, dir.path(), Format::Csv).unwrap();
    let csv = read(dir.path(), "efficiency-sweep.csv");
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    assert_eq!(manifest.status, RunStatus::Complete);
    for name in &manifest.outputs {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
}

#[test]
fn manifest_records_config_and_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ScenarioConfig::new(ScenarioKind::LifetimeFit);
    config.overrides.insert("lifetime.efficiencies.0".into(), toml::Value::Float(0.12));
    run(&config, dir.path(), Format::Json).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(manifest["status"], "complete");
    assert_eq!(manifest["scenario"], "lifetime-fit");
    assert_eq!(manifest["config"]["overrides"]["lifetime.efficiencies.0"], 0.12);
    assert_eq!(manifest["calibration"]["version"], "2026.10.1");
    assert_eq!(manifest["calibration"]["sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["code_version"].as_str().unwrap().starts_with("rtqm-harness "));
    assert!(manifest["wall_clock_s"].as_f64().unwrap() >= 0.0);
    assert!(manifest["summary"]["tau_c_s"].as_f64().is_some());

    let table: serde_json::Value = serde_json::from_str(&read(dir.path(), "lifetime-fit.json")).unwrap();
    assert_eq!(table["data"]["efficiency[1]"][0], 0.12);
    let snapshot = ScenarioConfig::parse(&read(dir.path(), "config.toml"), "snapshot").unwrap();
    assert_eq!(snapshot, config);
}

#[test]
fn nan_is_refused_with_its_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = Table::new("sweep", &["delta[Hz]", "eta[1]"]);
    t.push(vec![-5.0e8, 0.01]);
    t.push(vec![-4.75e8, f64::NAN]);
    let err = export(&[t], Format::Csv, dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("delta[Hz] = -4.75000000e8"), "{err}");
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn failing_point_flushes_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    // The third point puts the laser exactly on the virtual-state pole.
    let pole = -6.834682610904e9;
    let config = ScenarioConfig::new(ScenarioKind::EfficiencySweep).with_grid(pole - 2.0e6, pole + 1.0, 1.0e6);
    let err = run(&config, dir.path(), Format::Csv).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("at laser detuning -6.834682"), "{err}");

    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(manifest["status"], "failed");
    assert_eq!(manifest["partial"], true);
    assert_eq!(manifest["summary"]["completed_points"], 2);
    let partial = read(dir.path(), "efficiency-sweep_partial.csv");
    assert_eq!(partial.lines().count(), 3);
}

#[test]
fn physics_errors_map_to_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ScenarioConfig::new(ScenarioKind::LifetimeFit);
    config.overrides.insert("lifetime.efficiencies.2".into(), toml::Value::Float(0.0));
    let err = run(&config, dir.path(), Format::Csv).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(manifest["status"], "failed");
    assert_eq!(manifest["partial"], false);
}
