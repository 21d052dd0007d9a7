use super::curve::SpectralCurve;
use super::velocity::VelocityDistribution;
use crate::error::{Error, Result};

/// The convolution window must reach at least this many W_d on each side.
pub const MIN_WINDOW_WIDTHS: f64 = 3.0;

/// Treatment of samples beyond the grid edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    #[default]
    Zero,
    /// Wrap around; only meaningful for tests of the normalisation.
    Periodic,
}

/// Velocity-class average η_RT(Δⱼ) = Σᵢ wᵢ η(Δⱼ₊ᵢ), i = −i_max..=i_max,
/// with wᵢ = A(i·Δ_step) / Σₖ A(k·Δ_step). Zero padding beyond the grid.
pub fn broaden(curve: &SpectralCurve, dist: &VelocityDistribution, i_max: usize) -> Result<SpectralCurve> {
    broaden_with(curve, dist, i_max, Padding::Zero)
}

pub fn broaden_with(
    curve: &SpectralCurve,
    dist: &VelocityDistribution,
    i_max: usize,
    padding: Padding,
) -> Result<SpectralCurve> {
    let step = curve.delta_step();
    let reach = i_max as f64 * step;
    if reach < MIN_WINDOW_WIDTHS * dist.w_d * (1.0 - 1e-12) {
        return Err(Error::GridCoverage(format!(
            "window ±{reach:e} Hz is narrower than {MIN_WINDOW_WIDTHS}·W_d = {:e} Hz",
            MIN_WINDOW_WIDTHS * dist.w_d
        )));
    }

    let raw: Vec<f64> = (0..=2 * i_max)
        .map(|k| dist.weight((k as f64 - i_max as f64) * step))
        .collect();
    let norm: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / norm).collect();

    let values = curve.values();
    let n = values.len() as isize;
    let half = i_max as isize;
    let out = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for (k, w) in weights.iter().enumerate() {
                let idx = j + k as isize - half;
                let v = match padding {
                    Padding::Zero if idx < 0 || idx >= n => continue,
                    Padding::Zero => values[idx as usize],
                    Padding::Periodic => values[idx.rem_euclid(n) as usize],
                };
                acc += w * v;
            }
            acc
        })
        .collect();
    SpectralCurve::new(*curve.grid(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn grid(n: usize, step: f64) -> Grid {
        Grid::new(-(n as f64 / 2.0).floor() * step, step, n).unwrap()
    }

    #[test]
    fn window_must_cover_three_widths() {
        let dist = VelocityDistribution::new(100.0).unwrap();
        let c = SpectralCurve::zeros(grid(64, 10.0));
        assert!(broaden(&c, &dist, 29).is_err());
        assert!(broaden(&c, &dist, 30).is_ok());
    }

    #[test]
    fn constant_is_a_fixed_point_with_periodic_padding() {
        let dist = VelocityDistribution::new(100.0).unwrap();
        let c = SpectralCurve::from_fn(grid(200, 5.0), |_| 0.37).unwrap();
        let b = broaden_with(&c, &dist, 60, Padding::Periodic).unwrap();
        for v in b.values() {
            assert!((v - 0.37).abs() < 1e-10);
        }
    }

    #[test]
    fn discrete_delta_reproduces_kernel_shape() {
        let dist = VelocityDistribution::new(100.0).unwrap();
        let g = grid(401, 5.0);
        let mut values = vec![0.0; 401];
        values[200] = 1.0;
        let c = SpectralCurve::new(g, values).unwrap();
        let b = broaden(&c, &dist, 60).unwrap();
        let peak = b.values()[200];
        for j in 140..=260 {
            let expected = dist.weight(g.at(j) - g.at(200)) / dist.weight(0.0);
            assert!((b.values()[j] / peak - expected).abs() < 1e-12);
        }
        assert_eq!(b.values()[139], 0.0);
    }

    #[test]
    fn never_raises_the_maximum() {
        let dist = VelocityDistribution::new(50.0).unwrap();
        let c = SpectralCurve::from_fn(grid(300, 2.0), |d| (-(d / 20.0).powi(2)).exp()).unwrap();
        let b = broaden(&c, &dist, 80).unwrap();
        assert!(b.max() <= c.max());
    }
}
