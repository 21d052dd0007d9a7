//! Four-level atom: Hamiltonian, master equation and time integration.
//!
//! Levels are |1⟩, |2⟩ (ground), |3⟩ (excited) and |4⟩ (off-resonant virtual
//! state). The probe drives |1⟩↔|3⟩, the control drives |2⟩↔|3⟩ and, scaled by
//! `alpha / (omega43 + delta)`, both ground states to |4⟩.

mod evolve;
mod hamiltonian;
mod lindblad;
mod params;
mod state;

pub use evolve::{evolve, evolve_with, max_rate, EvolveOptions, Trajectory, STABILITY_LIMIT};
pub use hamiltonian::{build_hamiltonian, build_hamiltonian_eps, DEFAULT_DENOMINATOR_EPSILON};
pub use lindblad::{lindblad_rhs, liouvillian, vec_index};
pub use params::AtomFieldParams;
pub use state::{DensityMatrix, HamiltonianMatrix, Level, Operator};
