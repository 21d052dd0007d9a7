use crate::error::{Error, Result};
use crate::spectral::SpectralCurve;

#[derive(Debug, Clone, PartialEq)]
pub struct SbrReport {
    pub sbr_curve: SpectralCurve,
    pub optimal_delta: f64,
    pub sbr_at_optimum: f64,
    pub floor: f64,
}

/// SBR(Δ) = η(Δ)·T(Δ) / (Q(Δ) + floor); the optimum is the argmax, ties to smallest |Δ|.
pub fn sbr_curve(eta_rt: &SpectralCurve, t_rt: &SpectralCurve, q_rt: &SpectralCurve, floor: f64) -> Result<SbrReport> {
    if !eta_rt.grid().matches(t_rt.grid()) || !eta_rt.grid().matches(q_rt.grid()) {
        return Err(Error::GridMismatch("efficiency, transmission and background curves differ".into()));
    }
    if !floor.is_finite() || floor < 0.0 {
        return Err(Error::param("floor", format!("must be finite and >= 0, got {floor}")));
    }
    let mut values = Vec::with_capacity(eta_rt.len());
    for i in 0..eta_rt.len() {
        let denom = q_rt.values()[i] + floor;
        if !(denom > 0.0) {
            return Err(Error::Degenerate(format!(
                "background plus floor is {denom:e} at {:e} Hz",
                eta_rt.delta_at(i)
            )));
        }
        values.push((eta_rt.values()[i] * t_rt.values()[i]).max(0.0) / denom);
    }
    let sbr_curve = SpectralCurve::new(*eta_rt.grid(), values)?;
    let best = sbr_curve.argmax();
    Ok(SbrReport {
        optimal_delta: sbr_curve.delta_at(best),
        sbr_at_optimum: sbr_curve.values()[best],
        sbr_curve,
        floor,
    })
}
