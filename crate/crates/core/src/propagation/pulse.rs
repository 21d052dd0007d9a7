use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex field envelope on a uniform time grid, in photon-flux units:
/// Σ|E|²·dt is the photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseEnvelope {
    samples: Vec<Complex64>,
    dt: f64,
    t0: f64,
}

impl PulseEnvelope {
    pub fn new(samples: Vec<Complex64>, dt: f64, t0: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param("dt", format!("must be > 0, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::param("t0", "must be finite"));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("samples", "envelope samples must be finite"));
        }
        Ok(Self { samples, dt, t0 })
    }

    pub fn zeros(len: usize, dt: f64, t0: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len], dt, t0)
    }

    /// Gaussian with intensity FWHM `fwhm` centred at `centre`, scaled to carry `photons`.
    pub fn gaussian(len: usize, dt: f64, t0: f64, centre: f64, fwhm: f64, photons: f64) -> Result<Self> {
        if !(fwhm > 0.0) {
            return Err(Error::param("fwhm", format!("must be > 0, got {fwhm}")));
        }
        let shape: Vec<Complex64> = (0..len)
            .map(|n| {
                let x = (t0 + n as f64 * dt - centre) / fwhm;
                Complex64::new((-2.0 * LN_2 * x * x).exp(), 0.0)
            })
            .collect();
        let mut pulse = Self::new(shape, dt, t0)?;
        let energy = pulse.energy();
        if energy > 0.0 {
            let scale = (photons / energy).sqrt();
            pulse.samples.iter_mut().for_each(|z| *z *= scale);
        }
        Ok(pulse)
    }

    #[inline]
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn t0(&self) -> f64 {
        self.t0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    /// End of the last sample interval.
    pub fn end_time(&self) -> f64 {
        self.time(self.len())
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dt
    }

    /// Energy of the samples with t ∈ [start, end). `None` if no sample falls inside.
    pub fn energy_between(&self, start: f64, end: f64) -> Option<f64> {
        let mut any = false;
        let mut acc = 0.0;
        for (n, z) in self.samples.iter().enumerate() {
            let t = self.time(n);
            if t >= start && t < end {
                any = true;
                acc += z.norm_sqr();
            }
        }
        any.then_some(acc * self.dt)
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// RMS bandwidth (Hz) from finite differences of the envelope.
    pub fn rms_bandwidth(&self) -> f64 {
        let power: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        if power == 0.0 || self.len() < 2 {
            return 0.0;
        }
        let slope: f64 = self.samples.windows(2).map(|w| (w[1] - w[0]).norm_sqr()).sum();
        (slope / power).sqrt() / self.dt / TAU
    }

    pub(crate) fn from_parts_unchecked(samples: Vec<Complex64>, dt: f64, t0: f64) -> Self {
        Self { samples, dt, t0 }
    }
}
