use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Fabry-Perot etalon used as a narrowband filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtalonParams {
    /// Mirror reflectivity R.
    pub r: f64,
    /// Round-trip loss A.
    pub a: f64,
    /// Free spectral range (Hz).
    pub fsr: f64,
    /// Frequency of a transmission peak (Hz).
    pub detuning_offset: f64,
}

impl EtalonParams {
    /// R = 0.9955, A = 2·10⁻⁴, FSR = 13.6 GHz, peaked at zero detuning.
    pub const fn filter_default() -> Self {
        Self {
            r: 0.9955,
            a: 2.0e-4,
            fsr: 13.6e9,
            detuning_offset: 0.0,
        }
    }

    pub fn new(r: f64, a: f64, fsr: f64, detuning_offset: f64) -> Result<Self> {
        let e = Self {
            r,
            a,
            fsr,
            detuning_offset,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::param("etalon.r", format!("must lie in (0, 1), got {}", self.r)));
        }
        if !(self.a >= 0.0 && self.a < 1.0) {
            return Err(Error::param("etalon.a", format!("must lie in [0, 1), got {}", self.a)));
        }
        if !(self.fsr > 0.0) || !self.fsr.is_finite() {
            return Err(Error::param("etalon.fsr", format!("must be > 0, got {}", self.fsr)));
        }
        if !self.detuning_offset.is_finite() {
            return Err(Error::param("etalon.detuning_offset", "must be finite"));
        }
        Ok(())
    }

    /// Peak transmission (1 − A)².
    pub fn peak(&self) -> f64 {
        (1.0 - self.a).powi(2)
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.detuning_offset = offset;
        self
    }
}

/// Airy transmission ((1−R)(1−A))² / (1 + R² − 2R cos(2π(Δ − offset)/FSR)).
///
/// The phase is reduced modulo one FSR before the cosine, so shifting Δ by an
/// integer number of FSRs gives the same value whenever that shift is exact in
/// floating point.
pub fn etalon_transmission(delta: f64, etalon: &EtalonParams) -> f64 {
    let reduced = (delta - etalon.detuning_offset).rem_euclid(etalon.fsr);
    let r = etalon.r;
    let numerator = ((1.0 - r) * (1.0 - etalon.a)).powi(2);
    // 1 + R² − 2R cos φ written as (1 − R)² + 4R sin²(φ/2) to avoid cancellation near a peak.
    let s = (0.5 * TAU * reduced / etalon.fsr).sin();
    numerator / ((1.0 - r).powi(2) + 4.0 * r * s * s)
}

/// Product of the individual transmissions.
pub fn cascade_transmission(etalons: &[EtalonParams], delta: f64) -> Result<f64> {
    if etalons.is_empty() {
        return Err(Error::param("cascade", "at least one etalon is required"));
    }
    Ok(etalons.iter().map(|e| etalon_transmission(delta, e)).product())
}

/// FWHM from the finesse formula FSR·(1−R)/(π√R).
pub fn etalon_fwhm_finesse(etalon: &EtalonParams) -> f64 {
    etalon.fsr * (1.0 - etalon.r) / (PI * etalon.r.sqrt())
}

/// FWHM found by bisection on T(Δ) = peak/2 between the peak and half an FSR.
pub fn etalon_fwhm_numeric(etalon: &EtalonParams) -> f64 {
    let half = 0.5 * etalon_transmission(etalon.detuning_offset, etalon);
    let (mut lo, mut hi) = (0.0, 0.5 * etalon.fsr);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if etalon_transmission(etalon.detuning_offset + mid, etalon) > half {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 {
            break;
        }
    }
    lo + hi
}
