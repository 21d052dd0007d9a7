//! Maxwell-Bloch propagation of the probe (and the Stokes channel) through a
//! one-dimensional cell, co-integrated with the master equation of every slice.
//!
//! Fields are slowly varying envelopes in the retarded frame, so at each time
//! step the probe is swept through the slices front to back:
//! `E(z + dz) = E(z) + i·(Ω_pN/c)·dz·ρ₃₁(z)`. Atoms in a slice are then advanced
//! by one step driven by the slice-averaged field.
//!
//! The atomic step is an exponential integrator. The field-independent part of
//! the generator (detunings, control, all decays) is exponentiated exactly; the
//! weak probe enters as a forcing term held constant over the step. The
//! exponentials depend only on the control amplitude, so they are cached and
//! shared by all slices.

mod medium;
mod propagate;
mod protocol;
mod pulse;
mod scan;

pub use medium::MediumGrid;
pub use propagate::{propagate, storage_efficiency, BackgroundPhotons, StorageResult};
pub use protocol::{ControlSchedule, ProtocolTiming, StorageProtocol};
pub use pulse::PulseEnvelope;
pub use scan::{background_emission_scan, efficiency_bandwidth_scan, BackgroundSpectra};
