//! Scenario runner for the warm-vapour quantum memory simulator.
//!
//! A run reads a [`ScenarioConfig`], loads the versioned [`Calibration`]
//! (with any dotted-path overrides), executes one scenario and writes its
//! tables plus a `manifest.json` into the output directory. The manifest is
//! always written last, including after a failure, when it carries the error
//! and lists whatever partial results were flushed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod config;
pub mod error;
pub mod export;
pub mod keys;
pub mod manifest;
pub mod scenario;

use std::path::Path;
use std::time::Instant;

use rtqm_core::propagation::propagate;
use serde::Serialize;

pub use calibration::Calibration;
pub use config::{GridSpec, ScenarioConfig, ScenarioKind};
pub use error::{HarnessError, Result};
pub use export::{Format, Table};
pub use manifest::{RunManifest, RunStatus};
pub use scenario::{run_scenario, ScenarioOutput};

pub const CONFIG_SNAPSHOT: &str = "config.toml";

/// Runs `config` and writes its outputs to `out_dir`.
///
/// On a scenario failure the manifest is still written, marked failed, and
/// the original error is returned.
pub fn run(config: &ScenarioConfig, out_dir: &Path, format: Format) -> Result<RunManifest> {
    let start = Instant::now();
    let cal = Calibration::load(config.calibration.as_deref(), &config.overrides)?;
    log::info!(
        "running {} with calibration {} ({}) on {} thread(s)",
        config.scenario,
        cal.version(),
        cal.source,
        config.jobs
    );
    let result = scenario::run_scenario(config, &cal);

    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let snapshot = out_dir.join(CONFIG_SNAPSHOT);
    std::fs::write(&snapshot, config.to_toml()?).map_err(|e| HarnessError::io(&snapshot, e))?;

    let mut manifest = RunManifest {
        status: RunStatus::Complete,
        error: None,
        partial: false,
        scenario: config.scenario,
        config: config.clone(),
        calibration: (&cal).into(),
        code_version: manifest::CODE_VERSION.to_string(),
        wall_clock_s: 0.0,
        summary: Default::default(),
        outputs: vec![CONFIG_SNAPSHOT.to_string()],
    };

    let outcome = match result {
        Ok(out) => {
            manifest.summary = out.summary;
            export::export(&out.tables, format, out_dir).map(|names| manifest.outputs.extend(names))
        }
        Err(failure) => {
            if let Some(partial) = failure.partial {
                manifest.partial = true;
                manifest.summary = partial.summary;
                if let Ok(names) = export::export(&partial.tables, format, out_dir) {
                    manifest.outputs.extend(names);
                }
            }
            Err(failure.error)
        }
    };
    if let Err(e) = &outcome {
        manifest.status = RunStatus::Failed;
        manifest.error = Some(e.to_string());
    }
    manifest.wall_clock_s = start.elapsed().as_secs_f64();
    manifest.write(out_dir)?;
    outcome.map(|_| manifest)
}

/// Storage efficiency of the calibrated operating point, with and without control.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub version: String,
    pub sha256: String,
    pub source: String,
    pub optical_depth: f64,
    pub efficiency: f64,
    pub efficiency_control_off: f64,
}

pub fn calibration_report(cal: &Calibration) -> Result<CalibrationReport> {
    let setup = scenario::Setup::new(cal)?;
    let efficiency = setup.efficiency(0.0)?;
    let mut dark = setup.params;
    dark.omega_c = 0.0;
    let efficiency_control_off = propagate(&setup.protocol, &setup.medium, &dark)?.efficiency()?;
    Ok(CalibrationReport {
        version: cal.version().to_string(),
        sha256: cal.sha256.clone(),
        source: cal.source.clone(),
        optical_depth: setup.medium.optical_depth(&setup.params),
        efficiency,
        efficiency_control_off,
    })
}
