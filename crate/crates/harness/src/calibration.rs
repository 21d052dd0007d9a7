//! Versioned physics calibration: every parameter the measurements leave open.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rtqm_core::propagation::{MediumGrid, ProtocolTiming};
use rtqm_core::quantum::AtomFieldParams;
use rtqm_core::sbr::RoomTemperatureModel;
use rtqm_core::spectral::{
    AbsorptionLine, EtalonParams, MeasuredTable, TransmissionModel, TransmissionSource, VelocityDistribution,
};
use rtqm_core::units::hz_to_rad;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::Value;

use crate::error::{HarnessError, Result};
use crate::keys;

pub const DEFAULT_CALIBRATION: &str = include_str!("../calibration/default.toml");
pub const EMBEDDED_SOURCE: &str = "embedded:default.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSection {
    pub gamma31_hz: f64,
    pub gamma32_hz: f64,
    pub gamma41_hz: f64,
    pub gamma42_hz: f64,
    pub gamma12_hz: f64,
    pub omega43_hz: f64,
    pub symmetric_ground_decoherence: bool,
    pub alpha_ratio: f64,
    pub omega_p: f64,
    pub omega_c_hz: f64,
    pub delta13_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSection {
    pub optical_depth: f64,
    pub length_m: f64,
    pub slices: usize,
    pub stokes_coupling_ratio: f64,
    pub scatter_collection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub dt_s: f64,
    pub probe_fwhm_s: f64,
    pub probe_centre_s: f64,
    pub photons: f64,
    pub write_off_s: f64,
    pub storage_time_s: f64,
    pub retrieval_window_s: f64,
    pub edge_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomTemperatureSection {
    pub w_d_hz: f64,
    pub splitting_hz: f64,
    pub weight2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSection {
    pub center_hz: f64,
    pub optical_depth: f64,
    pub width_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionSection {
    pub source: String,
    pub table_path: String,
    pub lines: Vec<LineSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundSection {
    pub floor_fraction: f64,
    pub dual_rail: bool,
    pub suppression: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtalonSection {
    pub r: f64,
    pub a: f64,
    pub fsr_hz: f64,
    pub offset_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub swap_fsr_hz: f64,
    pub etalons: Vec<EtalonSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSection {
    pub sbr: f64,
    pub intrinsic_fidelity: f64,
    pub mean_photons: f64,
    pub efficiency: f64,
    pub rotation_axis: [f64; 3],
    pub rotation_angle_deg: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifetimeSection {
    pub storage_times_s: Vec<f64>,
    pub efficiencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationData {
    pub version: String,
    pub atom: AtomSection,
    pub medium: MediumSection,
    pub protocol: ProtocolSection,
    pub room_temperature: RoomTemperatureSection,
    pub transmission: TransmissionSection,
    pub background: BackgroundSection,
    pub filter: FilterSection,
    pub qubit: QubitSection,
    pub lifetime: LifetimeSection,
}

/// Parsed default calibration, used as the key schema for every calibration file.
pub fn schema() -> &'static Value {
    static SCHEMA: OnceLock<Value> = OnceLock::new();
    SCHEMA.get_or_init(|| keys::parse_document(DEFAULT_CALIBRATION, EMBEDDED_SOURCE).expect("embedded calibration parses"))
}

pub fn schema_paths() -> &'static [String] {
    static PATHS: OnceLock<Vec<String>> = OnceLock::new();
    PATHS.get_or_init(|| keys::leaf_paths(schema()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub data: CalibrationData,
    /// File path, or [`EMBEDDED_SOURCE`].
    pub source: String,
    /// SHA-256 of the calibration file bytes, before overrides.
    pub sha256: String,
    base_dir: Option<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl Calibration {
    pub fn embedded() -> Result<Self> {
        Self::from_text(DEFAULT_CALIBRATION, EMBEDDED_SOURCE.to_string(), None, &BTreeMap::new())
    }

    /// Reads `path` (or the embedded default) and applies dotted-path overrides.
    pub fn load(path: Option<&Path>, overrides: &BTreeMap<String, Value>) -> Result<Self> {
        match path {
            None => Self::from_text(DEFAULT_CALIBRATION, EMBEDDED_SOURCE.to_string(), None, overrides),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
                let base = p.parent().map(Path::to_path_buf);
                Self::from_text(&text, p.display().to_string(), base, overrides)
            }
        }
    }

    fn from_text(
        text: &str,
        source: String,
        base_dir: Option<PathBuf>,
        overrides: &BTreeMap<String, Value>,
    ) -> Result<Self> {
        let mut doc = keys::parse_document(text, &source)?;
        keys::conform(&mut doc, schema(), "", schema_paths())?;
        for (path, value) in overrides {
            keys::set_path(&mut doc, path, value.clone(), schema_paths())?;
            log::info!("calibration override: {path} = {value}");
        }
        let data: CalibrationData = doc
            .try_into()
            .map_err(|e: toml::de::Error| HarnessError::config(format!("{source}: {}", e.message())))?;
        let cal = Self { data, source, sha256: sha256_hex(text.as_bytes()), base_dir };
        cal.validate()?;
        Ok(cal)
    }

    pub fn version(&self) -> &str {
        &self.data.version
    }

    fn validate(&self) -> Result<()> {
        let d = &self.data;
        let positive = [
            ("medium.length_m", d.medium.length_m),
            ("protocol.dt_s", d.protocol.dt_s),
            ("room_temperature.w_d_hz", d.room_temperature.w_d_hz),
            ("background.suppression", d.background.suppression),
            ("filter.swap_fsr_hz", d.filter.swap_fsr_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(HarnessError::config(format!("calibration `{name}` must be > 0, got {v}")));
            }
        }
        if d.medium.slices == 0 {
            return Err(HarnessError::config("calibration `medium.slices` must be >= 1"));
        }
        if !(d.background.floor_fraction >= 0.0) {
            return Err(HarnessError::config("calibration `background.floor_fraction` must be >= 0"));
        }
        if d.filter.etalons.is_empty() {
            return Err(HarnessError::config("calibration `filter.etalons` needs at least one etalon"));
        }
        if d.lifetime.storage_times_s.len() != d.lifetime.efficiencies.len() {
            return Err(HarnessError::config(
                "calibration `lifetime.storage_times_s` and `lifetime.efficiencies` differ in length",
            ));
        }
        if d.qubit.rotation_axis.iter().map(|x| x * x).sum::<f64>() == 0.0 {
            return Err(HarnessError::config("calibration `qubit.rotation_axis` must be non-zero"));
        }
        if !(d.qubit.noise >= 0.0) {
            return Err(HarnessError::config("calibration `qubit.noise` must be >= 0"));
        }
        match d.transmission.source.as_str() {
            "model" | "table" => Ok(()),
            other => Err(HarnessError::config(format!(
                "calibration `transmission.source` must be \"model\" or \"table\", got \"{other}\""
            ))),
        }
    }

    /// Atom and field parameters at zero laser detuning, in rad/s.
    pub fn atom_params(&self) -> AtomFieldParams {
        let a = &self.data.atom;
        let omega43 = hz_to_rad(a.omega43_hz);
        AtomFieldParams {
            delta13: hz_to_rad(a.delta13_hz),
            delta23: 0.0,
            delta: 0.0,
            omega_p: a.omega_p,
            omega_c: hz_to_rad(a.omega_c_hz),
            alpha: a.alpha_ratio * omega43,
            omega43,
            gamma31: hz_to_rad(a.gamma31_hz),
            gamma32: hz_to_rad(a.gamma32_hz),
            gamma41: hz_to_rad(a.gamma41_hz),
            gamma42: hz_to_rad(a.gamma42_hz),
            gamma12: hz_to_rad(a.gamma12_hz),
            symmetric_ground_decoherence: a.symmetric_ground_decoherence,
        }
        .with_laser_detuning(0.0)
    }

    pub fn medium(&self, params: &AtomFieldParams) -> Result<MediumGrid> {
        let m = &self.data.medium;
        Ok(MediumGrid::with_optical_depth(m.slices, m.length_m, m.optical_depth, params)?
            .with_stokes_coupling(m.stokes_coupling_ratio * params.omega_p)
            .with_scatter_collection(m.scatter_collection))
    }

    pub fn timing(&self) -> ProtocolTiming {
        let p = &self.data.protocol;
        ProtocolTiming {
            dt: p.dt_s,
            probe_fwhm: p.probe_fwhm_s,
            probe_centre: p.probe_centre_s,
            photons: p.photons,
            write_off: p.write_off_s,
            storage_time: p.storage_time_s,
            retrieval_window: p.retrieval_window_s,
            edge: p.edge_s,
        }
    }

    pub fn room_model(&self) -> Result<RoomTemperatureModel> {
        let r = &self.data.room_temperature;
        Ok(RoomTemperatureModel {
            distribution: VelocityDistribution::new(r.w_d_hz)?,
            splitting: r.splitting_hz,
            weight2: r.weight2,
        })
    }

    pub fn transmission_source(&self) -> Result<TransmissionSource> {
        let t = &self.data.transmission;
        if t.source == "table" {
            let path = match &self.base_dir {
                Some(base) if Path::new(&t.table_path).is_relative() => base.join(&t.table_path),
                _ => PathBuf::from(&t.table_path),
            };
            let table = MeasuredTable::load(&path).map_err(|e| HarnessError::io(&path, e))??;
            return Ok(TransmissionSource::Table(table));
        }
        Ok(TransmissionSource::Model(TransmissionModel {
            lines: t
                .lines
                .iter()
                .map(|l| AbsorptionLine { center: l.center_hz, optical_depth: l.optical_depth, width: l.width_hz })
                .collect(),
        }))
    }

    pub fn cascade(&self) -> Result<Vec<EtalonParams>> {
        self.data
            .filter
            .etalons
            .iter()
            .map(|e| EtalonParams::new(e.r, e.a, e.fsr_hz, e.offset_hz).map_err(HarnessError::from))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_calibration_loads() {
        let cal = Calibration::embedded().unwrap();
        assert_eq!(cal.source, EMBEDDED_SOURCE);
        assert_eq!(cal.sha256.len(), 64);
        let p = cal.atom_params();
        assert!((p.alpha / p.omega43 - 0.05).abs() < 1e-15);
        let m = cal.medium(&p).unwrap();
        assert!((m.optical_depth(&p) - 2.0).abs() < 1e-9);
        assert_eq!(cal.cascade().unwrap().len(), 2);
    }

    #[test]
    fn overrides_change_values_but_not_hash() {
        let base = Calibration::embedded().unwrap();
        let mut ov = BTreeMap::new();
        ov.insert("atom.gamma12_hz".to_string(), Value::Integer(200));
        ov.insert("filter.etalons.1.fsr_hz".to_string(), Value::Float(10.2e9));
        let cal = Calibration::load(None, &ov).unwrap();
        assert_eq!(cal.data.atom.gamma12_hz, 200.0);
        assert_eq!(cal.data.filter.etalons[1].fsr_hz, 10.2e9);
        assert_eq!(cal.sha256, base.sha256);
    }

    #[test]
    fn unknown_override_suggests_key() {
        let mut ov = BTreeMap::new();
        ov.insert("atom.gama12".to_string(), Value::Float(1.0));
        let err = Calibration::load(None, &ov).unwrap_err().to_string();
        assert!(err.contains("atom.gamma12_hz"), "{err}");
    }

    #[test]
    fn wrong_type_is_config_error() {
        let mut ov = BTreeMap::new();
        ov.insert("medium.slices".to_string(), Value::String("many".into()));
        let err = Calibration::load(None, &ov).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
