use super::curve::SpectralCurve;
use crate::error::{Error, Result};

/// Curve translated by `shift` on its own grid: out(Δ) = curve(Δ − shift).
/// Linear interpolation; zero where the source is undefined.
pub fn shift_curve(curve: &SpectralCurve, shift: f64) -> SpectralCurve {
    let values = curve.grid().points().map(|d| curve.sample(d - shift)).collect();
    SpectralCurve::new(*curve.grid(), values).expect("interpolated samples are finite")
}

/// Response of a two-excited-state manifold: f1(Δ) + weight2 · f2(Δ − splitting).
pub fn manifold_compose(
    curve_f1: &SpectralCurve,
    curve_f2: &SpectralCurve,
    splitting: f64,
    weight2: f64,
) -> Result<SpectralCurve> {
    if !curve_f1.grid().matches(curve_f2.grid()) {
        return Err(Error::GridMismatch(format!(
            "manifold lines on different grids: {:?} vs {:?}",
            curve_f1.grid(),
            curve_f2.grid()
        )));
    }
    if !weight2.is_finite() || !splitting.is_finite() {
        return Err(Error::param("weight2", "splitting and weight must be finite"));
    }
    if weight2 == 0.0 {
        return Ok(curve_f1.clone());
    }
    let shifted = shift_curve(curve_f2, splitting);
    curve_f1.zip_with(&shifted, |a, b| a + weight2 * b)
}
