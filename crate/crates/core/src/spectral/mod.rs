//! Room-temperature spectral processing: Doppler/pressure broadening, the
//! two-line excited-state manifold, cell transmission and etalon filtering.

mod broaden;
mod curve;
mod etalon;
mod filter;
mod manifold;
mod transmission;
mod velocity;

pub use broaden::{broaden, broaden_with, Padding, MIN_WINDOW_WIDTHS};
pub use curve::{Fwhm, Grid, SpectralCurve};
pub use etalon::{
    cascade_transmission, etalon_fwhm_finesse, etalon_fwhm_numeric, etalon_transmission, EtalonParams,
};
pub use filter::{emission_line, etalon_scan, filter_background, FilteredBackground};
pub use manifold::{manifold_compose, shift_curve};
pub use transmission::{medium_transmission, AbsorptionLine, MeasuredTable, TransmissionModel, TransmissionSource};
pub use velocity::{velocity_weight, VelocityDistribution};
