//! Simulation core for a warm-vapor EIT quantum memory.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`]: four-level Hamiltonian, Lindblad right-hand side and a
//!   fixed-step RK4 integrator for a single atomic slice.
//! * [`propagation`]: Maxwell-Bloch co-integration of atoms and probe/Stokes
//!   fields through the cell, running the write/store/retrieve protocol.
//! * [`spectral`]: velocity/pressure broadening, excited-state manifold
//!   composition, cell transmission and the etalon filter stack.
//! * [`sbr`]: signal-to-background curves, Stokes-vector fidelity, frame
//!   alignment, classical thresholds and lifetime fits.
//!
//! Public interfaces take frequencies in Hz. Internally every rate and
//! detuning is an angular frequency (rad/s); [`units::hz_to_rad`] converts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod propagation;
pub mod quantum;
pub mod sbr;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
