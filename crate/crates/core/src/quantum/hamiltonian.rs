use num_complex::Complex64;

use super::params::AtomFieldParams;
use super::state::{HamiltonianMatrix, Level, Operator};
use crate::error::{Error, Result};

/// Smallest |ω₄₃ + Δ| accepted by [`build_hamiltonian`], as a fraction of ω₄₃.
pub const DEFAULT_DENOMINATOR_EPSILON: f64 = 1.0e-9;

/// Rotating-frame Hamiltonian for probe amplitude `e_p` and control amplitude `e_c`.
///
/// Diagonal: (−Δ₁₃+Δ) on |1⟩, −(Δ₁₃−Δ₂₃) on |2⟩, 0 on |3⟩, −(Δ₁₃−ω₄₃) on |4⟩.
/// Couplings: −Ω_pE_p on (3,1), −Ω_cE_c on (3,2), and
/// −α/(ω₄₃+Δ)·Ω_cE_c on both (4,1) and (4,2), each with its conjugate.
pub fn build_hamiltonian(
    params: &AtomFieldParams,
    e_p: Complex64,
    e_c: Complex64,
) -> Result<HamiltonianMatrix> {
    build_hamiltonian_eps(params, e_p, e_c, DEFAULT_DENOMINATOR_EPSILON * params.omega43.abs())
}

/// As [`build_hamiltonian`] with an absolute denominator threshold `epsilon` (rad/s).
pub fn build_hamiltonian_eps(
    params: &AtomFieldParams,
    e_p: Complex64,
    e_c: Complex64,
    epsilon: f64,
) -> Result<HamiltonianMatrix> {
    let denom = params.omega43 + params.delta;
    if denom.abs() < epsilon {
        return Err(Error::DegenerateDenominator {
            value: denom.abs(),
            epsilon,
        });
    }

    let (g1, g2, ex, vi) = (
        Level::Ground1.index(),
        Level::Ground2.index(),
        Level::Excited.index(),
        Level::Virtual.index(),
    );
    let mut h = Operator::zeros();
    h[(g1, g1)] = Complex64::new(-params.delta13 + params.delta, 0.0);
    h[(g2, g2)] = Complex64::new(-(params.delta13 - params.delta23), 0.0);
    h[(vi, vi)] = Complex64::new(-(params.delta13 - params.omega43), 0.0);

    let mut couple = |row: usize, col: usize, value: Complex64| {
        h[(row, col)] += value;
        h[(col, row)] += value.conj();
    };
    couple(ex, g1, -params.omega_p * e_p);
    couple(ex, g2, -params.omega_c * e_c);
    let raman = -(params.alpha / denom) * params.omega_c * e_c;
    couple(vi, g1, raman);
    couple(vi, g2, raman);

    Ok(HamiltonianMatrix(h))
}
