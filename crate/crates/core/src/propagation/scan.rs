use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::AtomFieldParams;
use crate::spectral::{Grid, SpectralCurve};
use crate::units::STOKES_OFFSET_HZ;

use super::medium::MediumGrid;
use super::propagate::{propagate, BackgroundPhotons};
use super::protocol::StorageProtocol;

/// Background photons per retrieval window versus laser detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundSpectra {
    pub scatter: SpectralCurve,
    /// Indexed by laser detuning; the light itself sits `stokes_offset` above.
    pub stokes: SpectralCurve,
    pub stokes_offset: f64,
}

fn annotate<T>(delta_hz: f64, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::AtDetuning { delta_hz, source: Box::new(e) })
}

fn scan_points<T, F>(grid: &Grid, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    (0..grid.count)
        .into_par_iter()
        .map(|i| {
            let d = grid.at(i);
            annotate(d, f(d))
        })
        .collect()
}

/// Storage efficiency at every laser detuning of `grid` (single velocity class).
pub fn efficiency_bandwidth_scan(
    grid: &Grid,
    protocol: &StorageProtocol,
    medium: &MediumGrid,
    params: &AtomFieldParams,
) -> Result<SpectralCurve> {
    let values = scan_points(grid, |d| {
        propagate(protocol, medium, &params.with_laser_detuning(d))?.efficiency()
    })?;
    SpectralCurve::new(*grid, values)
}

/// Scatter and Stokes photons in the retrieval window of a control-only
/// protocol, at every laser detuning of `grid`.
pub fn background_emission_scan(
    grid: &Grid,
    protocol: &StorageProtocol,
    medium: &MediumGrid,
    params: &AtomFieldParams,
) -> Result<BackgroundSpectra> {
    if !protocol.probe.is_zero() {
        return Err(Error::param("protocol", "background scan requires a vacuum probe"));
    }
    let values: Vec<BackgroundPhotons> = scan_points(grid, |d| {
        propagate(protocol, medium, &params.with_laser_detuning(d))?.background()
    })?;
    Ok(BackgroundSpectra {
        scatter: SpectralCurve::new(*grid, values.iter().map(|b| b.scatter).collect())?,
        stokes: SpectralCurve::new(*grid, values.iter().map(|b| b.stokes).collect())?,
        stokes_offset: STOKES_OFFSET_HZ,
    })
}
