use nalgebra::SMatrix;
use num_complex::Complex64;

use super::params::AtomFieldParams;
use super::state::{HamiltonianMatrix, Level, Operator};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Adds Γ(2 L ρ L† − L†L ρ − ρ L†L) for the jump L = |to⟩⟨from|.
#[inline]
fn add_jump(out: &mut Operator, rho: &Operator, to: usize, from: usize, rate: f64) {
    if rate == 0.0 {
        return;
    }
    out[(to, to)] += 2.0 * rate * rho[(from, from)];
    for k in 0..4 {
        out[(from, k)] -= rate * rho[(from, k)];
        out[(k, from)] -= rate * rho[(k, from)];
    }
}

/// Master-equation right-hand side dρ/dt.
///
/// −i[H, ρ] plus the excited-state decays |3⟩→|m⟩ (Γ₃ₘ), the virtual-state
/// decays |4⟩→|m⟩ (Γ₄ₘ) and the ground-state term Γ₁₂ moving |1⟩→|2⟩.
/// Each jump empties its source level at 2Γ. Linear in `rho`.
pub fn lindblad_rhs(rho: &Operator, h: &HamiltonianMatrix, params: &AtomFieldParams) -> Operator {
    let hm = h.matrix();
    let mut out = (hm * rho - rho * hm) * (-I);

    let (g1, g2, ex, vi) = (
        Level::Ground1.index(),
        Level::Ground2.index(),
        Level::Excited.index(),
        Level::Virtual.index(),
    );
    add_jump(&mut out, rho, g1, ex, params.gamma31);
    add_jump(&mut out, rho, g2, ex, params.gamma32);
    add_jump(&mut out, rho, g1, vi, params.gamma41);
    add_jump(&mut out, rho, g2, vi, params.gamma42);
    add_jump(&mut out, rho, g2, g1, params.gamma12);
    if params.symmetric_ground_decoherence {
        add_jump(&mut out, rho, g1, g2, params.gamma12);
    }
    out
}

/// Column-major position of ρ[(row, col)] in the vectorised density matrix.
#[inline]
pub const fn vec_index(row: usize, col: usize) -> usize {
    row + 4 * col
}

/// 16×16 superoperator 𝓛 with vec(dρ/dt) = 𝓛 · vec(ρ).
pub fn liouvillian(h: &HamiltonianMatrix, params: &AtomFieldParams) -> SMatrix<Complex64, 16, 16> {
    let mut l = SMatrix::<Complex64, 16, 16>::zeros();
    for col in 0..4 {
        for row in 0..4 {
            let mut basis = Operator::zeros();
            basis[(row, col)] = Complex64::new(1.0, 0.0);
            let image = lindblad_rhs(&basis, h, params);
            let j = vec_index(row, col);
            for (i, value) in image.as_slice().iter().enumerate() {
                l[(i, j)] = *value;
            }
        }
    }
    l
}
