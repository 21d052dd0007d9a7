use crate::error::{Error, Result};
use crate::spectral::{broaden, manifold_compose, SpectralCurve, VelocityDistribution, MIN_WINDOW_WIDTHS};
use crate::units::RB87_D1_EXCITED_SPLITTING_HZ;

/// Warm-vapour response built from a single-velocity-class curve: the two
/// excited-state lines are superposed and then averaged over velocity classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoomTemperatureModel {
    pub distribution: VelocityDistribution,
    /// Position of the upper excited line relative to the lower one (Hz).
    pub splitting: f64,
    /// Weight of the upper line relative to the lower one.
    pub weight2: f64,
}

impl Default for RoomTemperatureModel {
    fn default() -> Self {
        Self {
            distribution: VelocityDistribution::warm_cell(),
            splitting: RB87_D1_EXCITED_SPLITTING_HZ,
            weight2: 1.0,
        }
    }
}

impl RoomTemperatureModel {
    /// Smallest convolution half-window (in grid steps) accepted for `step`.
    pub fn window(&self, step: f64) -> usize {
        (MIN_WINDOW_WIDTHS * self.distribution.w_d / step).ceil() as usize
    }

    pub fn compose(&self, cold: &SpectralCurve) -> Result<SpectralCurve> {
        let both = manifold_compose(cold, cold, self.splitting, self.weight2)?;
        broaden(&both, &self.distribution, self.window(cold.delta_step()))
    }
}

/// `fraction` of the curve value at the grid point nearest Δ = 0.
pub fn resonance_floor(curve: &SpectralCurve, fraction: f64) -> Result<f64> {
    if !(fraction >= 0.0) || !fraction.is_finite() {
        return Err(Error::param("floor_fraction", format!("must be finite and >= 0, got {fraction}")));
    }
    let nearest = (0..curve.len())
        .min_by(|&a, &b| curve.delta_at(a).abs().total_cmp(&curve.delta_at(b).abs()))
        .expect("curves are never empty");
    Ok(fraction * curve.values()[nearest])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn composed_response_spreads_and_keeps_area() {
        let grid = Grid::from_range(-6e9, 6e9, 10e6).unwrap();
        let cold = SpectralCurve::from_fn(grid, |d| if d.abs() < 5e6 { 1.0 } else { 0.0 }).unwrap();
        let model = RoomTemperatureModel { weight2: 0.0, ..Default::default() };
        let rt = model.compose(&cold).unwrap();
        assert!(rt.max() < 0.05);
        let w = rt.fwhm();
        assert!((w.width - 960e6).abs() < 0.05 * 960e6, "{w:?}");
        assert!((rt.sum() - cold.sum()).abs() < 0.15 * cold.sum());
    }

    #[test]
    fn floor_from_resonance() {
        let grid = Grid::from_range(-2.0, 2.0, 1.0).unwrap();
        let c = SpectralCurve::new(grid, vec![1.0, 2.0, 10.0, 2.0, 1.0]).unwrap();
        assert_eq!(resonance_floor(&c, 0.1).unwrap(), 1.0);
    }
}
