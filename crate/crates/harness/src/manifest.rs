use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::calibration::Calibration;
use crate::config::{ScenarioConfig, ScenarioKind};
use crate::error::{HarnessError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRecord {
    pub version: String,
    pub sha256: String,
    pub source: String,
}

impl From<&Calibration> for CalibrationRecord {
    fn from(c: &Calibration) -> Self {
        Self { version: c.version().to_string(), sha256: c.sha256.clone(), source: c.source.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// True when the outputs hold only the grid points finished before a failure.
    pub partial: bool,
    pub scenario: ScenarioKind,
    pub config: ScenarioConfig,
    pub calibration: CalibrationRecord,
    pub code_version: String,
    pub wall_clock_s: f64,
    pub summary: BTreeMap<String, Value>,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Complete
    }

    /// Writes the manifest after checking that every listed output exists.
    pub fn write(&self, dir: &Path) -> Result<()> {
        for name in &self.outputs {
            let p = dir.join(name);
            if !p.is_file() {
                return Err(HarnessError::io(&p, std::io::Error::new(std::io::ErrorKind::NotFound, "output missing")));
            }
        }
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| HarnessError::Numeric(format!("cannot encode manifest: {e}")))?;
        fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))
    }
}
