//! Unit helpers. Configuration is in Hz, the dynamics run in rad/s.

use std::f64::consts::TAU;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// ⁸⁷Rb ground-state hyperfine splitting (Hz).
pub const RB87_GROUND_SPLITTING_HZ: f64 = 6.834_682_610_904e9;

/// ⁸⁷Rb 5P½ excited-state hyperfine splitting F'=1 to F'=2 (Hz).
pub const RB87_D1_EXCITED_SPLITTING_HZ: f64 = 814.5e6;

/// Frequency separation between the incoherent scatter and the Stokes field (Hz).
pub const STOKES_OFFSET_HZ: f64 = 13.6e9;

#[inline]
pub fn hz_to_rad(f: f64) -> f64 {
    TAU * f
}

#[inline]
pub fn rad_to_hz(w: f64) -> f64 {
    w / TAU
}
