use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::pulse::PulseEnvelope;

/// Control field envelope (dimensionless, multiplies Ω_c): on during writing,
/// off for the storage interval, on again for retrieval, with raised-cosine
/// edges of duration `edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSchedule {
    pub amplitude: f64,
    /// Time at which the falling edge completes (s).
    pub write_off: f64,
    /// Time at which the rising edge starts (s).
    pub retrieval_on: f64,
    pub edge: f64,
}

impl ControlSchedule {
    pub fn new(amplitude: f64, write_off: f64, retrieval_on: f64, edge: f64) -> Result<Self> {
        let s = Self { amplitude, write_off, retrieval_on, edge };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() || self.amplitude < 0.0 {
            return Err(Error::param("control.amplitude", "must be finite and >= 0"));
        }
        if !(self.edge >= 0.0) || !self.edge.is_finite() {
            return Err(Error::param("control.edge", "must be finite and >= 0"));
        }
        if !(self.retrieval_on > self.write_off) || !self.retrieval_on.is_finite() || !self.write_off.is_finite() {
            return Err(Error::param(
                "control",
                format!(
                    "retrieval must start after the write pulse ends (write_off {}, retrieval_on {})",
                    self.write_off, self.retrieval_on
                ),
            ));
        }
        Ok(())
    }

    pub fn storage_time(&self) -> f64 {
        self.retrieval_on - self.write_off
    }

    pub fn at(&self, t: f64) -> f64 {
        let a = self.amplitude;
        let fall = self.write_off - self.edge;
        if t <= fall {
            a
        } else if t < self.write_off {
            a * 0.5 * (1.0 + (PI * (t - fall) / self.edge).cos())
        } else if t <= self.retrieval_on {
            0.0
        } else if t < self.retrieval_on + self.edge {
            a * 0.5 * (1.0 - (PI * (t - self.retrieval_on) / self.edge).cos())
        } else {
            a
        }
    }
}

/// Write, store, read protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageProtocol {
    pub probe: PulseEnvelope,
    pub control: ControlSchedule,
    /// Length of the detection window that opens when retrieval starts (s).
    pub retrieval_window: f64,
}

impl StorageProtocol {
    pub fn new(probe: PulseEnvelope, control: ControlSchedule, retrieval_window: f64) -> Result<Self> {
        let p = Self { probe, control, retrieval_window };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.control.validate()?;
        if !(self.retrieval_window > 0.0) {
            return Err(Error::param("retrieval_window", "must be > 0"));
        }
        let (start, end) = self.roi();
        if start < self.probe.t0() || end > self.probe.end_time() + 0.5 * self.probe.dt() {
            return Err(Error::EmptyWindow(format!(
                "retrieval window [{start:e}, {end:e}] s lies outside the simulated span [{:e}, {:e}] s",
                self.probe.t0(),
                self.probe.end_time()
            )));
        }
        Ok(())
    }

    pub fn roi(&self) -> (f64, f64) {
        (self.control.retrieval_on, self.control.retrieval_on + self.retrieval_window)
    }

    pub fn storage_time(&self) -> f64 {
        self.control.storage_time()
    }

    /// Same schedule with the probe replaced by vacuum.
    pub fn control_only(&self) -> Self {
        let probe = PulseEnvelope::zeros(self.probe.len(), self.probe.dt(), self.probe.t0())
            .expect("grid already validated");
        Self { probe, ..self.clone() }
    }
}

/// Timing recipe for a Gaussian-probe storage protocol. All times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolTiming {
    pub dt: f64,
    pub probe_fwhm: f64,
    pub probe_centre: f64,
    pub photons: f64,
    pub write_off: f64,
    pub storage_time: f64,
    pub retrieval_window: f64,
    pub edge: f64,
}

impl Default for ProtocolTiming {
    fn default() -> Self {
        Self {
            dt: 1e-9,
            probe_fwhm: 400e-9,
            probe_centre: 600e-9,
            photons: 1.0,
            write_off: 1000e-9,
            storage_time: 700e-9,
            retrieval_window: 400e-9,
            edge: 50e-9,
        }
    }
}

impl ProtocolTiming {
    pub fn build(&self) -> Result<StorageProtocol> {
        if !(self.dt > 0.0) {
            return Err(Error::param("dt", "must be > 0"));
        }
        if !(self.storage_time > 0.0) {
            return Err(Error::param("storage_time", "must be > 0"));
        }
        let retrieval_on = self.write_off + self.storage_time;
        let end = retrieval_on + self.retrieval_window;
        let len = (end / self.dt).round() as usize;
        let probe = PulseEnvelope::gaussian(len, self.dt, 0.0, self.probe_centre, self.probe_fwhm, self.photons)?;
        let control = ControlSchedule::new(1.0, self.write_off, retrieval_on, self.edge)?;
        StorageProtocol::new(probe, control, self.retrieval_window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_shape() {
        let c = ControlSchedule::new(2.0, 1.0, 3.0, 0.5).unwrap();
        assert_eq!(c.at(0.0), 2.0);
        assert!((c.at(0.75) - 1.0).abs() < 1e-12);
        assert_eq!(c.at(2.0), 0.0);
        assert!((c.at(3.25) - 1.0).abs() < 1e-12);
        assert_eq!(c.at(4.0), 2.0);
        assert_eq!(c.storage_time(), 2.0);
    }

    #[test]
    fn off_strictly_between_write_and_read() {
        let c = ControlSchedule::new(1.0, 1.0, 2.0, 0.1).unwrap();
        for k in 0..=100 {
            let t = 1.0 + k as f64 * 0.01;
            assert_eq!(c.at(t), 0.0);
        }
    }

    #[test]
    fn default_protocol_is_consistent() {
        let p = ProtocolTiming::default().build().unwrap();
        assert_eq!(p.probe.len(), 2100);
        assert!((p.storage_time() - 700e-9).abs() < 1e-15);
        assert!((p.probe.energy() - 1.0).abs() < 1e-12);
        let bg = p.control_only();
        assert!(bg.probe.is_zero());
    }

    #[test]
    fn roi_outside_span_rejected() {
        let probe = PulseEnvelope::zeros(10, 1.0, 0.0).unwrap();
        let c = ControlSchedule::new(1.0, 2.0, 8.0, 0.0).unwrap();
        assert!(matches!(StorageProtocol::new(probe, c, 5.0), Err(Error::EmptyWindow(_))));
        assert!(ControlSchedule::new(1.0, 2.0, 2.0, 0.0).is_err());
    }
}
