use crate::error::{Error, Result};
use crate::units::{hz_to_rad, RB87_GROUND_SPLITTING_HZ};

/// Every symbol entering the Hamiltonian and the dissipators.
///
/// All fields are angular frequencies (rad/s). `alpha` carries rad/s so that
/// `alpha / (omega43 + delta)` is dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomFieldParams {
    /// One-photon probe detuning Δ₁₃.
    pub delta13: f64,
    /// One-photon control detuning Δ₂₃.
    pub delta23: f64,
    /// Laser detuning Δ.
    pub delta: f64,
    /// Probe coupling per unit field amplitude.
    pub omega_p: f64,
    /// Control coupling per unit field amplitude.
    pub omega_c: f64,
    pub alpha: f64,
    /// Splitting of the virtual state |4⟩.
    pub omega43: f64,
    pub gamma31: f64,
    pub gamma32: f64,
    pub gamma41: f64,
    pub gamma42: f64,
    /// Ground-state decoherence, transferring |1⟩ → |2⟩.
    pub gamma12: f64,
    /// Adds the mirror |2⟩ → |1⟩ channel at the same rate. Off by default.
    pub symmetric_ground_decoherence: bool,
}

impl AtomFieldParams {
    /// Decay rates used in the reference model (3 MHz, 1 GHz, 0.1 kHz), no
    /// fields, zero detunings, `omega43` at the ⁸⁷Rb ground splitting.
    pub fn rb87_d1_rates() -> Self {
        Self {
            delta13: 0.0,
            delta23: 0.0,
            delta: 0.0,
            omega_p: 0.0,
            omega_c: 0.0,
            alpha: 0.0,
            omega43: hz_to_rad(RB87_GROUND_SPLITTING_HZ),
            gamma31: hz_to_rad(3.0e6),
            gamma32: hz_to_rad(3.0e6),
            gamma41: hz_to_rad(1.0e9),
            gamma42: hz_to_rad(1.0e9),
            gamma12: hz_to_rad(0.1e3),
            symmetric_ground_decoherence: false,
        }
    }

    /// All rates and couplings zero. Useful as a starting point in tests.
    pub fn zeroed(omega43: f64) -> Self {
        Self {
            delta13: 0.0,
            delta23: 0.0,
            delta: 0.0,
            omega_p: 0.0,
            omega_c: 0.0,
            alpha: 0.0,
            omega43,
            gamma31: 0.0,
            gamma32: 0.0,
            gamma41: 0.0,
            gamma42: 0.0,
            gamma12: 0.0,
            symmetric_ground_decoherence: false,
        }
    }

    /// Sets the common laser detuning (Hz) with both fields tuned together, so
    /// the two-photon resonance is kept: Δ = Δ₂₃ = Δ₁₃ + `delta_hz`.
    pub fn with_laser_detuning(mut self, delta_hz: f64) -> Self {
        self.delta = self.delta13 + hz_to_rad(delta_hz);
        self.delta23 = self.delta;
        self
    }

    /// Coherence damping rate of ρ₃₁ (sets the probe absorption linewidth).
    pub fn probe_coherence_rate(&self) -> f64 {
        self.gamma31 + self.gamma32 + self.gamma12
    }

    /// Population decay rate of |3⟩ as the master equation is written (2·ΣΓ₃ₘ).
    pub fn excited_population_decay(&self) -> f64 {
        2.0 * (self.gamma31 + self.gamma32)
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("gamma31", self.gamma31),
            ("gamma32", self.gamma32),
            ("gamma41", self.gamma41),
            ("gamma42", self.gamma42),
            ("gamma12", self.gamma12),
        ];
        for (name, value) in rates {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::param(name, format!("rate must be finite and >= 0, got {value}")));
            }
        }
        if !(self.omega43 > 0.0) || !self.omega43.is_finite() {
            return Err(Error::param("omega43", format!("must be > 0, got {}", self.omega43)));
        }
        let others = [
            ("delta13", self.delta13),
            ("delta23", self.delta23),
            ("delta", self.delta),
            ("omega_p", self.omega_p),
            ("omega_c", self.omega_c),
            ("alpha", self.alpha),
        ];
        for (name, value) in others {
            if !value.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }
}
