use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

/// Combined Doppler and pressure broadening profile A(Δ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityDistribution {
    /// Width parameter W_d (Hz). Half maximum sits at Δ = W_d / 2.
    pub w_d: f64,
}

impl VelocityDistribution {
    /// W_d = 960 MHz, the fitted warm-cell value.
    pub const WARM_CELL_WIDTH_HZ: f64 = 960.0e6;

    pub fn new(w_d: f64) -> Result<Self> {
        if !(w_d > 0.0) || !w_d.is_finite() {
            return Err(Error::param("w_d", format!("must be > 0, got {w_d}")));
        }
        Ok(Self { w_d })
    }

    pub fn warm_cell() -> Self {
        Self {
            w_d: Self::WARM_CELL_WIDTH_HZ,
        }
    }

    /// A(Δ) = √ln2 / (W_d √π) · 1 / (1 + (2Δ)² / W_d²), in 1/Hz.
    #[inline]
    pub fn weight(&self, delta: f64) -> f64 {
        let x = 2.0 * delta / self.w_d;
        LN_2.sqrt() / (self.w_d * PI.sqrt()) / (1.0 + x * x)
    }
}

pub fn velocity_weight(delta: f64, dist: &VelocityDistribution) -> f64 {
    dist.weight(delta)
}
