//! Scenario configuration files.
//!
//! ```toml
//! scenario = "efficiency-sweep"
//! output = "out/efficiency"
//! jobs = 4
//!
//! [grid]
//! min_hz = -2.0e9
//! max_hz = 2.0e9
//! step_hz = 25.0e6
//!
//! [overrides]
//! "atom.gamma12_hz" = 200.0
//! ```
//!
//! Override keys are dotted calibration paths; numeric segments index arrays
//! (`filter.etalons.1.fsr_hz`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use rtqm_core::spectral::Grid;
use serde::{Deserialize, Serialize};
use toml::Value;

use crate::calibration;
use crate::error::{HarnessError, Result};
use crate::keys;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    EfficiencySweep,
    BackgroundSweep,
    SbrSweep,
    EtalonScan,
    QubitFidelity,
    LifetimeFit,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::EfficiencySweep,
        ScenarioKind::BackgroundSweep,
        ScenarioKind::SbrSweep,
        ScenarioKind::EtalonScan,
        ScenarioKind::QubitFidelity,
        ScenarioKind::LifetimeFit,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::EfficiencySweep => "efficiency-sweep",
            ScenarioKind::BackgroundSweep => "background-sweep",
            ScenarioKind::SbrSweep => "sbr-sweep",
            ScenarioKind::EtalonScan => "etalon-scan",
            ScenarioKind::QubitFidelity => "qubit-fidelity",
            ScenarioKind::LifetimeFit => "lifetime-fit",
        }
    }

    /// Sweeps over laser detuning, or over etalon offset for `etalon-scan`.
    pub fn needs_grid(&self) -> bool {
        !matches!(self, ScenarioKind::QubitFidelity | ScenarioKind::LifetimeFit)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| {
            let names: Vec<String> = Self::ALL.iter().map(|k| k.as_str().to_string()).collect();
            match keys::nearest(s, &names) {
                Some(n) => HarnessError::config(format!("unknown scenario `{s}` (did you mean `{n}`?)")),
                None => HarnessError::config(format!("unknown scenario `{s}`")),
            }
        })
    }
}

/// Detuning grid, inclusive of both ends, in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min_hz: f64,
    pub max_hz: f64,
    pub step_hz: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_hz > 0.0) || !self.step_hz.is_finite() {
            return Err(HarnessError::config(format!("range error: grid.step_hz must be > 0, got {}", self.step_hz)));
        }
        if !self.min_hz.is_finite() || !self.max_hz.is_finite() || !(self.min_hz < self.max_hz) {
            return Err(HarnessError::config(format!(
                "range error: grid.min_hz ({}) must be < grid.max_hz ({})",
                self.min_hz, self.max_hz
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        self.validate()?;
        Ok(Grid::from_range(self.min_hz, self.max_hz, self.step_hz)?)
    }
}

pub const DEFAULT_OUTPUT: &str = "out";
pub const DEFAULT_JOBS: usize = 1;
pub const DEFAULT_SEED: u64 = 0;

fn default_output() -> PathBuf {
    PathBuf::from(DEFAULT_OUTPUT)
}

fn default_jobs() -> usize {
    DEFAULT_JOBS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Seeds noise injection only; every other step is deterministic.
    #[serde(default)]
    pub seed: u64,
    /// Calibration file; the embedded default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Dotted calibration paths and their replacement values.
    #[serde(default)]
    pub overrides: BTreeMap<String, Value>,
}

const TOP_LEVEL: [&str; 7] = ["scenario", "grid", "output", "jobs", "seed", "calibration", "overrides"];
const GRID_KEYS: [&str; 3] = ["min_hz", "max_hz", "step_hz"];

/// Every key a config file or `--override` may name.
pub fn known_keys() -> &'static [String] {
    static KEYS: OnceLock<Vec<String>> = OnceLock::new();
    KEYS.get_or_init(|| {
        let mut v: Vec<String> = TOP_LEVEL.iter().filter(|k| **k != "grid").map(|k| k.to_string()).collect();
        v.extend(GRID_KEYS.iter().map(|k| format!("grid.{k}")));
        v.extend(calibration::schema_paths().iter().cloned());
        v
    })
}

fn check_keys(doc: &Value) -> Result<()> {
    let table = doc.as_table().expect("documents are tables");
    for (k, v) in table {
        if !TOP_LEVEL.contains(&k.as_str()) {
            return Err(keys::unknown_key(k, known_keys()));
        }
        if k == "grid" {
            let Some(g) = v.as_table() else {
                return Err(HarnessError::config("`grid` must be a table with min_hz, max_hz and step_hz"));
            };
            for gk in g.keys() {
                if !GRID_KEYS.contains(&gk.as_str()) {
                    return Err(keys::unknown_key(&format!("grid.{gk}"), known_keys()));
                }
            }
        }
    }
    Ok(())
}

/// Flattens nested `[overrides.section]` tables to dotted keys and checks each
/// key against the calibration schema.
fn normalise_overrides(doc: &mut Value) -> Result<()> {
    let Some(table) = doc.as_table_mut() else { return Ok(()) };
    let Some(raw) = table.remove("overrides") else { return Ok(()) };
    if !raw.is_table() {
        return Err(HarnessError::config("`overrides` must be a table of dotted keys"));
    }
    let mut flat = Vec::new();
    keys::flatten("", &raw, &mut flat);
    let mut probe = calibration::schema().clone();
    let mut out = toml::Table::new();
    for (k, v) in flat {
        keys::set_path(&mut probe, &k, v.clone(), known_keys())?;
        out.insert(k, v);
    }
    table.insert("overrides".into(), Value::Table(out));
    Ok(())
}

fn widen_grid(doc: &mut Value) {
    if let Some(Value::Table(g)) = doc.get_mut("grid") {
        for (_, v) in g.iter_mut() {
            if let Value::Integer(i) = *v {
                *v = Value::Float(i as f64);
            }
        }
    }
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind) -> Self {
        Self {
            scenario,
            grid: None,
            output: default_output(),
            jobs: DEFAULT_JOBS,
            seed: DEFAULT_SEED,
            calibration: None,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_grid(mut self, min_hz: f64, max_hz: f64, step_hz: f64) -> Self {
        self.grid = Some(GridSpec { min_hz, max_hz, step_hz });
        self
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        Self::parse_with(text, origin, &[])
    }

    /// Parses `text` and then applies `key=value` overrides. Keys naming config
    /// fields (`jobs`, `grid.step_hz`, ...) set those fields; any other key is
    /// recorded as a calibration override.
    pub fn parse_with(text: &str, origin: &str, overrides: &[(String, Value)]) -> Result<Self> {
        let mut doc = keys::parse_document(text, origin)?;
        check_keys(&doc)?;
        normalise_overrides(&mut doc)?;
        for (k, v) in overrides {
            apply_override(&mut doc, k, v.clone())?;
        }
        widen_grid(&mut doc);
        let present: Vec<String> = doc.as_table().map(|t| t.keys().cloned().collect()).unwrap_or_default();
        let config: ScenarioConfig = doc
            .try_into()
            .map_err(|e: toml::de::Error| HarnessError::config(format!("{origin}: {}", e.message())))?;
        config.validate()?;
        config.log_defaults(&present);
        Ok(config)
    }

    /// Reads a config file. A relative `calibration` path is taken relative to the file.
    pub fn load(path: &Path, overrides: &[(String, Value)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut config = Self::parse_with(&text, &path.display().to_string(), overrides)?;
        if let (Some(cal), Some(dir)) = (&config.calibration, path.parent()) {
            if cal.is_relative() {
                config.calibration = Some(dir.join(cal));
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HarnessError::config(format!("cannot serialise config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs < 1 {
            return Err(HarnessError::config("range error: jobs must be >= 1"));
        }
        match (&self.grid, self.scenario.needs_grid()) {
            (Some(g), _) => g.validate()?,
            (None, true) => {
                return Err(HarnessError::config(format!(
                    "scenario `{}` needs a [grid] with min_hz, max_hz and step_hz",
                    self.scenario
                )))
            }
            (None, false) => {}
        }
        let mut probe = calibration::schema().clone();
        for (k, v) in &self.overrides {
            keys::set_path(&mut probe, k, v.clone(), known_keys())?;
        }
        Ok(())
    }

    fn log_defaults(&self, present: &[String]) {
        let has = |k: &str| present.iter().any(|p| p == k);
        if !has("output") {
            log::info!("default: output = {}", self.output.display());
        }
        if !has("jobs") {
            log::info!("default: jobs = {}", self.jobs);
        }
        if !has("seed") {
            log::info!("default: seed = {}", self.seed);
        }
        if !has("calibration") && self.calibration.is_none() {
            log::info!("default: calibration = {}", calibration::EMBEDDED_SOURCE);
        }
        if self.grid.is_none() {
            log::info!("default: no detuning grid ({} does not sweep)", self.scenario);
        }
        for path in calibration::schema_paths() {
            if !self.overrides.contains_key(path) {
                log::debug!("default: {path} from calibration");
            }
        }
        log::info!(
            "physics parameters: {} from calibration, {} overridden",
            calibration::schema_paths().len() - self.overrides.len(),
            self.overrides.len()
        );
    }
}

fn apply_override(doc: &mut Value, key: &str, value: Value) -> Result<()> {
    let table = doc.as_table_mut().expect("documents are tables");
    let first = key.split('.').next().unwrap_or(key);
    match first {
        "grid" => {
            let sub = key.strip_prefix("grid.").unwrap_or("");
            if !GRID_KEYS.contains(&sub) {
                return Err(keys::unknown_key(key, known_keys()));
            }
            let g = table.entry("grid").or_insert_with(|| Value::Table(toml::Table::new()));
            g.as_table_mut()
                .ok_or_else(|| HarnessError::config("`grid` must be a table"))?
                .insert(sub.to_string(), value);
        }
        "scenario" | "output" | "jobs" | "seed" | "calibration" if first == key => {
            table.insert(key.to_string(), value);
        }
        _ => {
            let mut probe = calibration::schema().clone();
            keys::set_path(&mut probe, key, value.clone(), known_keys())?;
            let ov = table.entry("overrides").or_insert_with(|| Value::Table(toml::Table::new()));
            ov.as_table_mut().expect("normalised overrides").insert(key.to_string(), value);
        }
    }
    Ok(())
}

/// Splits `key=value`, parsing the value as a TOML literal when possible.
pub fn parse_override(arg: &str) -> Result<(String, Value)> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| HarnessError::config(format!("override `{arg}` is not of the form key=value")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(HarnessError::config(format!("override `{arg}` has an empty key")));
    }
    Ok((k.to_string(), keys::parse_scalar(v.trim())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "scenario = \"efficiency-sweep\"\n[grid]\nmin_hz = -1e9\nmax_hz = 1e9\nstep_hz = 25e6\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let c = ScenarioConfig::parse(MINIMAL, "t").unwrap();
        assert_eq!(c.jobs, 1);
        assert_eq!(c.seed, 0);
        assert_eq!(c.output, PathBuf::from("out"));
        assert!(c.overrides.is_empty());
    }

    #[test]
    fn integer_grid_values_are_accepted() {
        let c = ScenarioConfig::parse("scenario = \"sbr-sweep\"\n[grid]\nmin_hz = -2\nmax_hz = 2\nstep_hz = 1\n", "t")
            .unwrap();
        assert_eq!(c.grid.unwrap().step_hz, 1.0);
    }

    #[test]
    fn nested_overrides_flatten() {
        let text = format!("{MINIMAL}[overrides.atom]\ngamma12_hz = 200\n");
        let c = ScenarioConfig::parse(&text, "t").unwrap();
        assert_eq!(c.overrides.get("atom.gamma12_hz"), Some(&Value::Integer(200)));
    }

    #[test]
    fn cli_overrides_route_by_key() {
        let ov = vec![
            parse_override("jobs=3").unwrap(),
            parse_override("grid.step_hz=5e7").unwrap(),
            parse_override("medium.slices=20").unwrap(),
        ];
        let c = ScenarioConfig::parse_with(MINIMAL, "t", &ov).unwrap();
        assert_eq!(c.jobs, 3);
        assert_eq!(c.grid.unwrap().step_hz, 5e7);
        assert_eq!(c.overrides["medium.slices"], Value::Integer(20));
        assert!(ScenarioConfig::parse_with(MINIMAL, "t", &[parse_override("grid.stp=1").unwrap()]).is_err());
        assert!(parse_override("novalue").is_err());
    }

    #[test]
    fn bad_scenario_name_suggests() {
        let err = ScenarioConfig::parse("scenario = \"sbr-swep\"\n", "t").unwrap_err().to_string();
        assert!(err.contains("sbr-sweep"), "{err}");
        assert!("sbr-swep".parse::<ScenarioKind>().unwrap_err().to_string().contains("sbr-sweep"));
    }

    #[test]
    fn grid_less_scenarios() {
        let c = ScenarioConfig::parse("scenario = \"lifetime-fit\"\n", "t").unwrap();
        assert!(c.grid.is_none());
        assert!(ScenarioConfig::parse("scenario = \"etalon-scan\"\n", "t").is_err());
    }

    #[test]
    fn jobs_zero_is_range_error() {
        let err = ScenarioConfig::parse(&format!("jobs = 0\n{MINIMAL}"), "t").unwrap_err();
        assert!(err.to_string().contains("jobs"));
    }
}
