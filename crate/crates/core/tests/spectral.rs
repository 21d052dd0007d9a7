use rtqm_core::spectral::{
    broaden, etalon_fwhm_finesse, etalon_fwhm_numeric, EtalonParams, Grid, SpectralCurve, VelocityDistribution,
};

#[test]
fn broadening_matches_direct_double_sum() {
    let dist = VelocityDistribution::warm_cell();
    let step = 2e6;
    let grid = Grid::new(-4.0e9, step, 4096).unwrap();
    let curve = SpectralCurve::from_fn(grid, |d| {
        (-(d / 40e6).powi(2)).exp() + 0.3 * (-((d - 814.5e6) / 25e6).powi(2)).exp() + 1e-3 * (d / 1e9).sin().abs()
    })
    .unwrap();
    let i_max = (3.0 * dist.w_d / step).ceil() as usize;
    let fast = broaden(&curve, &dist, i_max).unwrap();

    let a = |x: f64| 1.0 / (1.0 + (2.0 * x / 960e6).powi(2));
    let m = i_max as i64;
    let norm: f64 = (-m..=m).map(|i| a(i as f64 * step)).sum();
    let v = curve.values();
    for j in 0..v.len() as i64 {
        let mut acc = 0.0;
        for i in -m..=m {
            let k = j + i;
            if (0..v.len() as i64).contains(&k) {
                acc += a(i as f64 * step) / norm * v[k as usize];
            }
        }
        assert!((fast.values()[j as usize] - acc).abs() <= 1e-10);
    }
}

#[test]
fn narrow_line_takes_the_velocity_width() {
    let dist = VelocityDistribution::warm_cell();
    let step = 2e6;
    let grid = Grid::from_range(-6e9, 6e9, step).unwrap();
    let sigma = 10e6 / (8.0 * 2f64.ln()).sqrt();
    let curve = SpectralCurve::from_fn(grid, |d| (-0.5 * (d / sigma).powi(2)).exp()).unwrap();
    let out = broaden(&curve, &dist, (3.0 * dist.w_d / step).ceil() as usize).unwrap();
    let w = out.fwhm();
    assert!(w.bounded);
    assert!((w.width - 960e6).abs() <= 0.05 * 960e6, "{}", w.width);
}

#[test]
fn etalon_width_from_root_finding() {
    let e = EtalonParams::filter_default();
    let numeric = etalon_fwhm_numeric(&e);
    let formula = etalon_fwhm_finesse(&e);
    assert!((numeric - formula).abs() <= 0.02 * formula);
    assert!((numeric - 19.5e6).abs() <= 0.02 * 19.5e6);
}
