use std::path::Path;

use super::curve::{Grid, SpectralCurve};
use crate::error::{Error, Result};

/// One broadened absorption line of the warm cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionLine {
    pub center: f64,
    /// Optical depth at line centre.
    pub optical_depth: f64,
    /// Full width at half maximum (Hz).
    pub width: f64,
}

impl AbsorptionLine {
    /// Peak-normalised line shape, 1 at the centre and ½ at ±width/2.
    pub fn shape(&self, delta: f64) -> f64 {
        let x = 2.0 * (delta - self.center) / self.width;
        1.0 / (1.0 + x * x)
    }
}

/// T(Δ) = exp(−Σₖ ODₖ·Lₖ(Δ)).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransmissionModel {
    pub lines: Vec<AbsorptionLine>,
}

impl TransmissionModel {
    pub fn validate(&self) -> Result<()> {
        for line in &self.lines {
            if !(line.optical_depth >= 0.0) || !line.optical_depth.is_finite() {
                return Err(Error::param("transmission.optical_depth", "must be finite and >= 0"));
            }
            if !(line.width > 0.0) || !line.width.is_finite() {
                return Err(Error::param("transmission.width", "must be > 0"));
            }
            if !line.center.is_finite() {
                return Err(Error::param("transmission.center", "must be finite"));
            }
        }
        Ok(())
    }

    pub fn transmission(&self, delta: f64) -> f64 {
        let od: f64 = self.lines.iter().map(|l| l.optical_depth * l.shape(delta)).sum();
        (-od).exp()
    }
}

/// Measured transmission profile: strictly increasing Δ (Hz), T in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredTable {
    deltas: Vec<f64>,
    values: Vec<f64>,
}

impl MeasuredTable {
    pub fn new(deltas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if deltas.len() != values.len() || deltas.len() < 2 {
            return Err(Error::param("table", "need at least two (Δ, T) rows"));
        }
        for w in deltas.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::param("table", format!("Δ not strictly increasing at {:e}", w[1])));
            }
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param("table", format!("transmission {v} outside [0, 1]")));
        }
        Ok(Self { deltas, values })
    }

    /// Two whitespace- or comma-separated columns, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut deltas = Vec::new();
        let mut values = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            let parse_err = |reason: String| Error::TableParse { line: n + 1, reason };
            if cols.len() != 2 {
                return Err(parse_err(format!("expected 2 columns, found {}", cols.len())));
            }
            let d: f64 = cols[0].parse().map_err(|e| parse_err(format!("bad detuning: {e}")))?;
            let t: f64 = cols[1].parse().map_err(|e| parse_err(format!("bad transmission: {e}")))?;
            if let Some(&prev) = deltas.last() {
                if !(d > prev) {
                    return Err(parse_err(format!("detuning {d} not greater than {prev}")));
                }
            }
            if !(0.0..=1.0).contains(&t) {
                return Err(parse_err(format!("transmission {t} outside [0, 1]")));
            }
            deltas.push(d);
            values.push(t);
        }
        Self::new(deltas, values)
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::parse(&text))
    }

    pub fn range(&self) -> (f64, f64) {
        (self.deltas[0], *self.deltas.last().unwrap())
    }

    /// Linear interpolation; `None` outside the tabulated range.
    pub fn interpolate(&self, delta: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if delta < lo || delta > hi {
            return None;
        }
        let k = self.deltas.partition_point(|&d| d <= delta);
        if k == self.deltas.len() {
            return Some(*self.values.last().unwrap());
        }
        let (d0, d1) = (self.deltas[k - 1], self.deltas[k]);
        let f = (delta - d0) / (d1 - d0);
        Some(self.values[k - 1] * (1.0 - f) + self.values[k] * f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransmissionSource {
    Model(TransmissionModel),
    Table(MeasuredTable),
}

/// Cell transmission T_RT(Δ) on `grid`.
pub fn medium_transmission(grid: &Grid, source: &TransmissionSource) -> Result<SpectralCurve> {
    match source {
        TransmissionSource::Model(model) => {
            model.validate()?;
            SpectralCurve::from_fn(*grid, |d| model.transmission(d))
        }
        TransmissionSource::Table(table) => {
            let (lo, hi) = table.range();
            if grid.delta0 < lo || grid.last() > hi {
                return Err(Error::GridCoverage(format!(
                    "table covers [{lo:e}, {hi:e}] Hz, grid needs [{:e}, {:e}] Hz",
                    grid.delta0,
                    grid.last()
                )));
            }
            let values = grid.points().map(|d| table.interpolate(d).unwrap_or(0.0)).collect();
            SpectralCurve::new(*grid, values)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transparent_without_absorbers() {
        let g = Grid::new(-1e9, 1e7, 201).unwrap();
        let model = TransmissionModel {
            lines: vec![AbsorptionLine {
                center: 0.0,
                optical_depth: 0.0,
                width: 1e8,
            }],
        };
        let t = medium_transmission(&g, &TransmissionSource::Model(model)).unwrap();
        assert!(t.values().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn beer_lambert_at_line_centre() {
        let g = Grid::new(-1e9, 1e7, 201).unwrap();
        let model = TransmissionModel {
            lines: vec![AbsorptionLine {
                center: 0.0,
                optical_depth: 2.0,
                width: 9.6e8,
            }],
        };
        let t = medium_transmission(&g, &TransmissionSource::Model(model)).unwrap();
        assert!((t.values()[100] - (-2.0f64).exp()).abs() < 1e-15);
        assert!((t.values()[100] - 0.1353).abs() < 1e-4);
    }

    #[test]
    fn table_parsing_and_coverage() {
        let text = "# detuning_hz transmission\n-2e9 0.9\n0 0.2 # centre\n\n2e9, 0.8\n";
        let table = MeasuredTable::parse(text).unwrap();
        assert_eq!(table.interpolate(-1e9), Some(0.55));
        let inside = Grid::new(-2e9, 1e9, 5).unwrap();
        let t = medium_transmission(&inside, &TransmissionSource::Table(table.clone())).unwrap();
        assert_eq!(t.values(), &[0.9, 0.55, 0.2, 0.5, 0.8]);
        let outside = Grid::new(-3e9, 1e9, 5).unwrap();
        assert!(matches!(
            medium_transmission(&outside, &TransmissionSource::Table(table)),
            Err(Error::GridCoverage(_))
        ));
    }

    #[test]
    fn table_errors_carry_line_numbers() {
        let err = MeasuredTable::parse("0 0.5\n1 0.4\n1 0.3\n").unwrap_err();
        assert!(matches!(err, Error::TableParse { line: 3, .. }));
        let err = MeasuredTable::parse("0 0.5\n1 1.5\n").unwrap_err();
        assert!(matches!(err, Error::TableParse { line: 2, .. }));
        let err = MeasuredTable::parse("0 0.5 9\n").unwrap_err();
        assert!(matches!(err, Error::TableParse { line: 1, .. }));
    }
}
