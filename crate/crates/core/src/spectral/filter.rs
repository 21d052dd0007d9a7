use super::curve::{Grid, SpectralCurve};
use super::etalon::{cascade_transmission, EtalonParams};
use crate::error::{Error, Result};

/// Background photons behind the etalon stack, per component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilteredBackground {
    /// Etalon scan offset (Hz).
    pub offset: f64,
    pub scatter: f64,
    pub stokes: f64,
    /// Photons in both components before the filter.
    pub input_total: f64,
}

impl FilteredBackground {
    pub fn total(&self) -> f64 {
        self.scatter + self.stokes
    }

    /// Filtered photons as a fraction of the photons entering the filter.
    pub fn normalized(&self) -> f64 {
        if self.input_total > 0.0 {
            self.total() / self.input_total
        } else {
            0.0
        }
    }
}

fn transmitted(curve: &SpectralCurve, cascade: &[EtalonParams], offset: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (j, q) in curve.values().iter().enumerate() {
        if *q != 0.0 {
            acc += cascade_transmission(cascade, curve.delta_at(j) - offset)? * q;
        }
    }
    Ok(acc)
}

/// Passes both background spectra (photons per bin, each on its own emission
/// axis) through the etalon cascade shifted by `etalon_scan_offset`.
pub fn filter_background(
    q_scatter: &SpectralCurve,
    q_stokes: &SpectralCurve,
    cascade: &[EtalonParams],
    etalon_scan_offset: f64,
) -> Result<FilteredBackground> {
    if cascade.is_empty() {
        return Err(Error::param("cascade", "at least one etalon is required"));
    }
    for e in cascade {
        e.validate()?;
    }
    if q_scatter.values().iter().chain(q_stokes.values()).any(|q| *q < 0.0) {
        return Err(Error::param("background", "photon spectra must be non-negative"));
    }
    Ok(FilteredBackground {
        offset: etalon_scan_offset,
        scatter: transmitted(q_scatter, cascade, etalon_scan_offset)?,
        stokes: transmitted(q_stokes, cascade, etalon_scan_offset)?,
        input_total: q_scatter.sum() + q_stokes.sum(),
    })
}

/// [`filter_background`] over every offset of `offsets`.
pub fn etalon_scan(
    q_scatter: &SpectralCurve,
    q_stokes: &SpectralCurve,
    cascade: &[EtalonParams],
    offsets: &Grid,
) -> Result<Vec<FilteredBackground>> {
    offsets
        .points()
        .map(|o| filter_background(q_scatter, q_stokes, cascade, o))
        .collect()
}

/// Lorentzian emission line on `grid`, in photons per bin, summing to `photons`.
pub fn emission_line(grid: Grid, centre: f64, fwhm: f64, photons: f64) -> Result<SpectralCurve> {
    if !(fwhm > 0.0) {
        return Err(Error::param("linewidth", format!("must be > 0, got {fwhm}")));
    }
    if centre < grid.delta0 || centre > grid.last() {
        return Err(Error::GridCoverage(format!(
            "line centre {centre:e} Hz outside [{:e}, {:e}] Hz",
            grid.delta0,
            grid.last()
        )));
    }
    let shape = SpectralCurve::from_fn(grid, |d| {
        let x = 2.0 * (d - centre) / fwhm;
        1.0 / (1.0 + x * x)
    })?;
    let norm = shape.sum();
    Ok(shape.scaled(photons / norm))
}
