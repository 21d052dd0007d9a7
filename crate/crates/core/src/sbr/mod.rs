//! Signal-to-background analysis and qubit fidelity.

mod compose;
mod fidelity;
mod lifetime;
mod report;
mod stokes;

pub use compose::{resonance_floor, RoomTemperatureModel};
pub use fidelity::{
    classical_thresholds, sbr_to_fidelity, ClassicalThresholds, FidelityReport, INTERCEPT_RESEND_BOUND,
    NONUNITARY_BOUND,
};
pub use lifetime::{lifetime_fit, LifetimeFit};
pub use report::{sbr_curve, SbrReport};
pub use stokes::{align_frames, fidelity, FrameAlignment, StokesVector};
