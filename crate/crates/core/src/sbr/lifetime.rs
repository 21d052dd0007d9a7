use crate::error::{Error, Result};

/// η(τ) = η₀·exp(−τ/τ_c) fitted by least squares on ln η.
#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeFit {
    pub eta0: f64,
    /// Coherence time τ_c (s).
    pub tau_c: f64,
    /// ln η − ln η_fit at every point.
    pub residuals: Vec<f64>,
    pub rms_residual: f64,
}

pub fn lifetime_fit(points: &[(f64, f64)]) -> Result<LifetimeFit> {
    if points.len() < 2 {
        return Err(Error::param("points", "at least two (storage time, efficiency) pairs are needed"));
    }
    for &(t, eta) in points {
        if !t.is_finite() {
            return Err(Error::param("storage_time", "must be finite"));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::param("efficiency", format!("must be > 0 for a log fit, got {eta}")));
        }
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_t) * (p.1.ln() - mean_y)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("all storage times are equal".into()));
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::Degenerate(format!("efficiency does not decay (log slope {slope:e} 1/s)")));
    }
    let intercept = mean_y - slope * mean_t;
    let residuals: Vec<f64> = points.iter().map(|p| p.1.ln() - (intercept + slope * p.0)).collect();
    let rms_residual = (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    Ok(LifetimeFit { eta0: intercept.exp(), tau_c: -1.0 / slope, residuals, rms_residual })
}
