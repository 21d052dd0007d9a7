use crate::error::{Error, Result};

/// Uniform detuning grid Δⱼ = Δ₀ + j·Δ_step, j = 0..count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub delta0: f64,
    pub step: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(delta0: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::param("delta_step", format!("must be > 0, got {step}")));
        }
        if count == 0 {
            return Err(Error::param("count", "grid needs at least one point"));
        }
        if !delta0.is_finite() {
            return Err(Error::param("delta0", "must be finite"));
        }
        Ok(Self { delta0, step, count })
    }

    /// Points from `min` to `max` inclusive (within 1e-9 of a step).
    pub fn from_range(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(max >= min) {
            return Err(Error::param("grid", format!("max {max} < min {min}")));
        }
        if !(step > 0.0) {
            return Err(Error::param("delta_step", format!("must be > 0, got {step}")));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        Self::new(min, step, count)
    }

    #[inline]
    pub fn at(&self, j: usize) -> f64 {
        self.delta0 + j as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |j| self.at(j))
    }

    pub fn last(&self) -> f64 {
        self.at(self.count - 1)
    }

    /// Same spacing and count, origins within a millionth of a step.
    pub fn matches(&self, other: &Grid) -> bool {
        self.count == other.count
            && (self.step - other.step).abs() <= 1e-9 * self.step
            && (self.delta0 - other.delta0).abs() <= 1e-6 * self.step
    }

    pub fn shifted(&self, offset: f64) -> Grid {
        Grid {
            delta0: self.delta0 + offset,
            ..*self
        }
    }
}

/// Full width at half maximum of a sampled peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fwhm {
    pub width: f64,
    /// False when the curve never drops below half maximum on one side of the
    /// peak inside the grid; `width` is then a lower bound.
    pub bounded: bool,
}

/// Real-valued function of detuning sampled on a uniform grid (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    grid: Grid,
    values: Vec<f64>,
}

impl SpectralCurve {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.count
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("values", format!("non-finite sample at Δ = {:e} Hz", grid.at(j))));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.count],
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn delta0(&self) -> f64 {
        self.grid.delta0
    }

    #[inline]
    pub fn delta_step(&self) -> f64 {
        self.grid.step
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn delta_at(&self, j: usize) -> f64 {
        self.grid.at(j)
    }

    /// Same samples relabelled onto a grid with a shifted origin.
    pub fn relabelled(&self, offset: f64) -> SpectralCurve {
        SpectralCurve {
            grid: self.grid.shifted(offset),
            values: self.values.clone(),
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the maximum; ties go to the smallest |Δ|, then to the lower Δ.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for j in 1..self.len() {
            let (v, b) = (self.values[j], self.values[best]);
            if v > b || (v == b && self.grid.at(j).abs() < self.grid.at(best).abs()) {
                best = j;
            }
        }
        best
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Rectangle-rule integral Σ values · Δ_step.
    pub fn integral(&self) -> f64 {
        self.sum() * self.grid.step
    }

    /// Linear interpolation, zero outside the grid.
    pub fn sample(&self, delta: f64) -> f64 {
        let x = (delta - self.grid.delta0) / self.grid.step;
        if x < 0.0 || x > (self.len() - 1) as f64 {
            return 0.0;
        }
        let j = x.floor() as usize;
        if j + 1 >= self.len() {
            return self.values[self.len() - 1];
        }
        let f = x - j as f64;
        self.values[j] * (1.0 - f) + self.values[j + 1] * f
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<SpectralCurve> {
        SpectralCurve::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, factor: f64) -> SpectralCurve {
        SpectralCurve {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Pointwise combination of two curves on the same grid.
    pub fn zip_with(&self, other: &SpectralCurve, f: impl Fn(f64, f64) -> f64) -> Result<SpectralCurve> {
        if !self.grid.matches(&other.grid) {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        SpectralCurve::new(self.grid, values)
    }

    pub fn add(&self, other: &SpectralCurve) -> Result<SpectralCurve> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &SpectralCurve) -> Result<SpectralCurve> {
        self.zip_with(other, |a, b| a * b)
    }

    /// FWHM around the global maximum, with linear interpolation of the crossings.
    pub fn fwhm(&self) -> Fwhm {
        let peak = self.argmax();
        let half = 0.5 * self.values[peak];
        let step = self.grid.step;

        let mut bounded = true;
        let left = {
            let mut j = peak;
            while j > 0 && self.values[j - 1] > half {
                j -= 1;
            }
            if j == 0 {
                bounded = false;
                self.grid.at(0)
            } else {
                let (a, b) = (self.values[j - 1], self.values[j]);
                self.grid.at(j - 1) + step * (half - a) / (b - a)
            }
        };
        let right = {
            let mut j = peak;
            while j + 1 < self.len() && self.values[j + 1] > half {
                j += 1;
            }
            if j + 1 == self.len() {
                bounded = false;
                self.grid.last()
            } else {
                let (a, b) = (self.values[j], self.values[j + 1]);
                self.grid.at(j) + step * (a - half) / (a - b)
            }
        };
        Fwhm {
            width: right - left,
            bounded,
        }
    }
}
