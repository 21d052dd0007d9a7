use std::collections::BTreeMap;

use rtqm_harness::config::parse_override;
use rtqm_harness::{Calibration, ScenarioConfig, ScenarioKind};
use toml::Value;

const MINIMAL: &str = r#"
scenario = "efficiency-sweep"

[grid]
min_hz = -2.0e9
max_hz = 2.0e9
step_hz = 25.0e6
"#;

#[test]
fn minimal_file_fills_defaults_and_calibration() {
    let c = ScenarioConfig::parse(MINIMAL, "minimal.toml").unwrap();
    assert_eq!(c.scenario, ScenarioKind::EfficiencySweep);
    assert_eq!(c.jobs, 1);
    assert!(c.calibration.is_none());
    assert_eq!(c.grid.unwrap().grid().unwrap().count, 161);

    let cal = Calibration::load(c.calibration.as_deref(), &c.overrides).unwrap();
    let p = cal.atom_params();
    assert!((p.gamma12 - 2.0 * std::f64::consts::PI * 100.0).abs() < 1e-9);
    assert!(p.omega_c > 0.0 && p.alpha > 0.0 && p.omega43 > 0.0);
}

#[test]
fn misspelt_physics_key_names_the_nearest_one() {
    let text = format!("gama12 = 200.0\n{MINIMAL}");
    let err = ScenarioConfig::parse(&text, "typo.toml").unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let msg = err.to_string();
    assert!(msg.contains("gama12") && msg.contains("atom.gamma12_hz"), "{msg}");

    let text = format!("{MINIMAL}[overrides]\n\"atom.gama12\" = 200.0\n");
    let msg = ScenarioConfig::parse(&text, "typo.toml").unwrap_err().to_string();
    assert!(msg.contains("atom.gamma12_hz"), "{msg}");

    let text = format!("{MINIMAL}stp_hz = 1.0\n");
    let msg = ScenarioConfig::parse(&text, "typo.toml").unwrap_err().to_string();
    assert!(msg.contains("grid.step_hz"), "{msg}");
}

#[test]
fn zero_step_and_reversed_grid_are_range_errors() {
    let zero = MINIMAL.replace("step_hz = 25.0e6", "step_hz = 0.0");
    let msg = ScenarioConfig::parse(&zero, "t").unwrap_err().to_string();
    assert!(msg.contains("range error") && msg.contains("step_hz"), "{msg}");

    let reversed = MINIMAL.replace("min_hz = -2.0e9", "min_hz = 3.0e9");
    let msg = ScenarioConfig::parse(&reversed, "t").unwrap_err().to_string();
    assert!(msg.contains("range error"), "{msg}");
}

#[test]
fn syntax_errors_carry_the_line() {
    let text = "scenario = \"sbr-sweep\"\n\n[grid]\nmin_hz = -1e9\nmax_hz = = 1e9\n";
    let msg = ScenarioConfig::parse(text, "broken.toml").unwrap_err().to_string();
    assert!(msg.contains("broken.toml") && msg.contains("line 5"), "{msg}");
}

#[test]
fn validated_config_round_trips() {
    let text = format!("jobs = 4\nseed = 9\noutput = \"runs/a\"\ncalibration = \"cal.toml\"\n{MINIMAL}");
    let mut ov = vec![parse_override("filter.etalons.1.fsr_hz=10.2e9").unwrap()];
    ov.push(parse_override("qubit.rotation_axis=[0.0, 0.0, 1.0]").unwrap());
    ov.push(parse_override("atom.symmetric_ground_decoherence=true").unwrap());
    let original = ScenarioConfig::parse_with(&text, "t", &ov).unwrap();
    let serialised = original.to_toml().unwrap();
    let reloaded = ScenarioConfig::parse(&serialised, "round-trip").unwrap();
    assert_eq!(original, reloaded);
    assert_eq!(reloaded.to_toml().unwrap(), serialised);

    for kind in ScenarioKind::ALL {
        let mut c = ScenarioConfig::new(kind);
        if kind.needs_grid() {
            c = c.with_grid(-1.0e8, 1.0e8, 1.0e7);
        }
        let again = ScenarioConfig::parse(&c.to_toml().unwrap(), "t").unwrap();
        assert_eq!(c, again);
    }
}

#[test]
fn overrides_reach_the_calibration() {
    let text = format!("{MINIMAL}[overrides]\n\"medium.optical_depth\" = 3\n\"transmission.lines.1.optical_depth\" = 2.5\n");
    let c = ScenarioConfig::parse(&text, "t").unwrap();
    let cal = Calibration::load(None, &c.overrides).unwrap();
    assert_eq!(cal.data.medium.optical_depth, 3.0);
    assert_eq!(cal.data.transmission.lines[1].optical_depth, 2.5);

    let mut bad = BTreeMap::new();
    bad.insert("transmission.lines.7.optical_depth".to_string(), Value::Float(1.0));
    assert_eq!(Calibration::load(None, &bad).unwrap_err().exit_code(), 1);
}

#[test]
fn external_calibration_file_is_hashed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cal.toml");
    let text = rtqm_harness::calibration::DEFAULT_CALIBRATION.replace("version = \"2026.10.1\"", "version = \"test\"");
    std::fs::write(&path, &text).unwrap();
    let cal = Calibration::load(Some(&path), &BTreeMap::new()).unwrap();
    assert_eq!(cal.version(), "test");
    assert_eq!(cal.sha256, rtqm_harness::calibration::sha256_hex(text.as_bytes()));
    assert_ne!(cal.sha256, Calibration::embedded().unwrap().sha256);

    std::fs::write(&path, text.replace("weight2 = 1.0", "weight2 = 1.0\nwieght3 = 2.0")).unwrap();
    let msg = Calibration::load(Some(&path), &BTreeMap::new()).unwrap_err().to_string();
    assert!(msg.contains("wieght3"), "{msg}");

    let missing = dir.path().join("absent.toml");
    assert_eq!(Calibration::load(Some(&missing), &BTreeMap::new()).unwrap_err().exit_code(), 3);
}
