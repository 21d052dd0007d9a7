use crate::error::{Error, Result};
use crate::quantum::AtomFieldParams;
use crate::units::SPEED_OF_LIGHT;

/// Discretised cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumGrid {
    pub n_slices: usize,
    /// Cell length L (m).
    pub length: f64,
    /// Effective atom number N.
    pub atom_number: f64,
    /// Ω_p·N/c, rad/(s·m) per unit coherence.
    pub coupling_prefactor: f64,
    /// Ω_s·N/c for the Stokes channel.
    pub stokes_prefactor: f64,
    /// Effective number of emitters whose spontaneous emission lands in the
    /// detected mode.
    pub scatter_collection: f64,
}

impl MediumGrid {
    /// Stokes coupling defaults to the probe coupling; no scatter collection.
    pub fn new(n_slices: usize, length: f64, atom_number: f64, omega_p: f64) -> Result<Self> {
        let prefactor = omega_p * atom_number / SPEED_OF_LIGHT;
        let grid = Self {
            n_slices,
            length,
            atom_number,
            coupling_prefactor: prefactor,
            stokes_prefactor: prefactor,
            scatter_collection: 0.0,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Chooses N so that the resonant two-level intensity optical depth
    /// 2·(Ω_pN/c)·Ω_p·L / γ₃₁ equals `optical_depth`.
    pub fn with_optical_depth(
        n_slices: usize,
        length: f64,
        optical_depth: f64,
        params: &AtomFieldParams,
    ) -> Result<Self> {
        let gamma = params.probe_coherence_rate();
        if !(params.omega_p > 0.0) || !(gamma > 0.0) {
            return Err(Error::param(
                "optical_depth",
                "needs omega_p > 0 and a non-zero probe coherence decay",
            ));
        }
        if !(optical_depth >= 0.0) || !optical_depth.is_finite() {
            return Err(Error::param("optical_depth", format!("must be >= 0, got {optical_depth}")));
        }
        let atoms = optical_depth * gamma * SPEED_OF_LIGHT / (2.0 * params.omega_p.powi(2) * length);
        Self::new(n_slices, length, atoms, params.omega_p)
    }

    pub fn with_stokes_coupling(mut self, omega_s: f64) -> Self {
        self.stokes_prefactor = omega_s * self.atom_number / SPEED_OF_LIGHT;
        self
    }

    pub fn with_scatter_collection(mut self, emitters: f64) -> Self {
        self.scatter_collection = emitters;
        self
    }

    pub fn with_slices(mut self, n_slices: usize) -> Self {
        self.n_slices = n_slices;
        self
    }

    pub fn optical_depth(&self, params: &AtomFieldParams) -> f64 {
        2.0 * self.coupling_prefactor * params.omega_p * self.length / params.probe_coherence_rate()
    }

    #[inline]
    pub fn dz(&self) -> f64 {
        self.length / self.n_slices as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_slices < 1 {
            return Err(Error::param("n_slices", "must be >= 1"));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::param("length", format!("must be > 0, got {}", self.length)));
        }
        if !(self.atom_number >= 0.0) || !self.atom_number.is_finite() {
            return Err(Error::param("atom_number", "must be finite and >= 0"));
        }
        if !(self.scatter_collection >= 0.0) || !self.scatter_collection.is_finite() {
            return Err(Error::param("scatter_collection", "must be finite and >= 0"));
        }
        if !self.coupling_prefactor.is_finite() || !self.stokes_prefactor.is_finite() {
            return Err(Error::param("coupling_prefactor", "must be finite"));
        }
        Ok(())
    }
}
