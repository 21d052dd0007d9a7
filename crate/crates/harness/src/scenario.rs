//! One runner per scenario kind. Sweeps evaluate every grid point
//! independently on a worker pool and merge results in grid order.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rtqm_core::propagation::{propagate, MediumGrid, StorageProtocol};
use rtqm_core::quantum::AtomFieldParams;
use rtqm_core::sbr::{
    align_frames, classical_thresholds, lifetime_fit, resonance_floor, sbr_curve, sbr_to_fidelity, FidelityReport,
    StokesVector,
};
use rtqm_core::spectral::{
    etalon_fwhm_numeric, etalon_scan, filter_background, medium_transmission, Grid, SpectralCurve,
};
use rtqm_core::units::STOKES_OFFSET_HZ;
use serde_json::{json, Value};

use crate::calibration::Calibration;
use crate::config::{ScenarioConfig, ScenarioKind};
use crate::error::{HarnessError, Result};
use crate::export::Table;

pub type Summary = BTreeMap<String, Value>;

pub const DELTA: &str = "delta[Hz]";
pub const ETA_COLD: &str = "eta_cold[1]";
pub const ETA_RT: &str = "eta_rt[arb]";
pub const T_RT: &str = "t_rt[1]";
pub const ETA_RT_T_RT: &str = "eta_rt_t_rt[arb]";
pub const Q_SCATTER_COLD: &str = "q_scatter_cold[photons]";
pub const Q_STOKES_COLD: &str = "q_stokes_cold[photons]";
pub const Q_SCATTER_RT: &str = "q_scatter_rt[arb]";
pub const Q_STOKES_RT: &str = "q_stokes_rt[arb]";
pub const Q_RT: &str = "q_rt[arb]";
pub const SBR: &str = "sbr[1]";

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub tables: Vec<Table>,
    pub summary: Summary,
}

#[derive(Debug)]
pub struct ScenarioFailure {
    pub error: HarnessError,
    /// Results for the grid points finished before the failing one.
    pub partial: Option<ScenarioOutput>,
}

impl From<HarnessError> for ScenarioFailure {
    fn from(error: HarnessError) -> Self {
        Self { error, partial: None }
    }
}

impl From<rtqm_core::Error> for ScenarioFailure {
    fn from(e: rtqm_core::Error) -> Self {
        HarnessError::from(e).into()
    }
}

pub type ScenarioResult = std::result::Result<ScenarioOutput, ScenarioFailure>;

pub fn run_scenario(config: &ScenarioConfig, cal: &Calibration) -> ScenarioResult {
    match config.scenario {
        ScenarioKind::EfficiencySweep => efficiency_sweep(config, cal),
        ScenarioKind::BackgroundSweep => background_sweep(config, cal),
        ScenarioKind::SbrSweep => sbr_sweep(config, cal),
        ScenarioKind::EtalonScan => etalon_scan_run(config, cal),
        ScenarioKind::QubitFidelity => qubit_fidelity(config, cal),
        ScenarioKind::LifetimeFit => lifetime(cal),
    }
}

/// Atom, medium and protocol at the calibrated operating point.
#[derive(Debug, Clone)]
pub struct Setup {
    pub params: AtomFieldParams,
    pub medium: MediumGrid,
    pub protocol: StorageProtocol,
    pub vacuum: StorageProtocol,
}

impl Setup {
    pub fn new(cal: &Calibration) -> Result<Self> {
        let params = cal.atom_params();
        let medium = cal.medium(&params)?;
        let protocol = cal.timing().build()?;
        let vacuum = protocol.control_only();
        Ok(Self { params, medium, protocol, vacuum })
    }

    pub fn efficiency(&self, delta_hz: f64) -> rtqm_core::Result<f64> {
        propagate(&self.protocol, &self.medium, &self.params.with_laser_detuning(delta_hz))?.efficiency()
    }

    /// Scatter and Stokes photons in the retrieval window without a probe.
    pub fn background(&self, delta_hz: f64) -> rtqm_core::Result<(f64, f64)> {
        let b = propagate(&self.vacuum, &self.medium, &self.params.with_laser_detuning(delta_hz))?.background()?;
        Ok((b.scatter, b.stokes))
    }
}

fn grid_of(config: &ScenarioConfig) -> Result<Grid> {
    config
        .grid
        .as_ref()
        .ok_or_else(|| HarnessError::config(format!("scenario `{}` needs a grid", config.scenario)))?
        .grid()
}

/// Evaluates `f` at every grid point on `jobs` threads. On failure, the rows
/// finished before the first failing point come back as a partial table.
fn cold_sweep<F>(
    config: &ScenarioConfig,
    grid: &Grid,
    columns: &[&str],
    f: F,
) -> std::result::Result<Vec<Vec<f64>>, ScenarioFailure>
where
    F: Fn(f64) -> rtqm_core::Result<Vec<f64>> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| HarnessError::Numeric(format!("cannot start {} worker threads: {e}", config.jobs)))?;
    let results: Vec<rtqm_core::Result<Vec<f64>>> = pool.install(|| {
        (0..grid.count)
            .into_par_iter()
            .map(|i| {
                let d = grid.at(i);
                f(d).map_err(|e| rtqm_core::Error::AtDetuning { delta_hz: d, source: Box::new(e) })
            })
            .collect()
    });

    let mut rows = Vec::with_capacity(grid.count);
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(values) => rows.push(values),
            Err(e) => {
                let mut header = vec![DELTA];
                header.extend_from_slice(columns);
                let mut table = Table::new(format!("{}_partial", config.scenario), &header);
                for (j, values) in rows.iter().enumerate() {
                    let mut row = vec![grid.at(j)];
                    row.extend_from_slice(values);
                    table.push(row);
                }
                let mut summary = Summary::new();
                summary.insert("completed_points".into(), json!(i));
                summary.insert("grid_points".into(), json!(grid.count));
                summary.insert("failed_at_hz".into(), json!(grid.at(i)));
                return Err(ScenarioFailure {
                    error: e.into(),
                    partial: Some(ScenarioOutput { tables: vec![table], summary }),
                });
            }
        }
    }
    Ok(rows)
}

fn column(grid: &Grid, rows: &[Vec<f64>], j: usize) -> Result<SpectralCurve> {
    Ok(SpectralCurve::new(*grid, rows.iter().map(|r| r[j]).collect())?)
}

fn at_resonance(curve: &SpectralCurve) -> f64 {
    let j = (0..curve.len())
        .min_by(|&a, &b| curve.delta_at(a).abs().total_cmp(&curve.delta_at(b).abs()))
        .expect("curves are never empty");
    curve.values()[j]
}

fn describe(summary: &mut Summary, prefix: &str, curve: &SpectralCurve) {
    let w = curve.fwhm();
    let peak = curve.argmax();
    summary.insert(format!("{prefix}_max"), json!(curve.max()));
    summary.insert(format!("{prefix}_peak_hz"), json!(curve.delta_at(peak)));
    summary.insert(format!("{prefix}_at_resonance"), json!(at_resonance(curve)));
    summary.insert(format!("{prefix}_fwhm_hz"), json!(w.width));
    summary.insert(format!("{prefix}_fwhm_bounded"), json!(w.bounded));
}

/// Width of the Stokes component over that of the scatter component. When the
/// Stokes curve never falls to half maximum on the grid the ratio is a lower bound.
fn width_ratio(summary: &mut Summary, scatter: &SpectralCurve, stokes: &SpectralCurve) {
    let (ws, wk) = (scatter.fwhm(), stokes.fwhm());
    summary.insert("stokes_to_scatter_fwhm_ratio".into(), json!(wk.width / ws.width));
    summary.insert("fwhm_ratio_is_lower_bound".into(), json!(ws.bounded && !wk.bounded));
    summary.insert("fwhm_ratio_determined".into(), json!(ws.bounded));
}

fn side(delta: f64) -> &'static str {
    if delta < 0.0 {
        "red"
    } else if delta > 0.0 {
        "blue"
    } else {
        "resonant"
    }
}

fn efficiency_sweep(config: &ScenarioConfig, cal: &Calibration) -> ScenarioResult {
    let grid = grid_of(config)?;
    let setup = Setup::new(cal)?;
    let rows = cold_sweep(config, &grid, &[ETA_COLD], |d| Ok(vec![setup.efficiency(d)?]))?;
    let cold = column(&grid, &rows, 0)?;
    let eta_rt = cal.room_model()?.compose(&cold)?;
    let t_rt = medium_transmission(&grid, &cal.transmission_source()?)?;
    let product = eta_rt.mul(&t_rt)?;

    let mut table = Table::new(config.scenario.as_str(), &[DELTA, ETA_COLD, ETA_RT, T_RT, ETA_RT_T_RT]);
    for j in 0..grid.count {
        table.push(vec![
            grid.at(j),
            cold.values()[j],
            eta_rt.values()[j],
            t_rt.values()[j],
            product.values()[j],
        ]);
    }
    let mut summary = Summary::new();
    summary.insert("grid_points".into(), json!(grid.count));
    describe(&mut summary, "eta_cold", &cold);
    describe(&mut summary, "eta_rt", &eta_rt);
    describe(&mut summary, "eta_rt_t_rt", &product);
    summary.insert("eta_rt_t_rt_side".into(), json!(side(product.delta_at(product.argmax()))));
    Ok(ScenarioOutput { tables: vec![table], summary })
}

fn background_sweep(config: &ScenarioConfig, cal: &Calibration) -> ScenarioResult {
    let grid = grid_of(config)?;
    let setup = Setup::new(cal)?;
    let rows = cold_sweep(config, &grid, &[Q_SCATTER_COLD, Q_STOKES_COLD], |d| {
        let (s, k) = setup.background(d)?;
        Ok(vec![s, k])
    })?;
    let scatter = column(&grid, &rows, 0)?;
    let stokes = column(&grid, &rows, 1)?;
    let room = cal.room_model()?;
    let scatter_rt = room.compose(&scatter)?;
    let stokes_rt = room.compose(&stokes)?;

    let mut table = Table::new(
        config.scenario.as_str(),
        &[DELTA, Q_SCATTER_COLD, Q_STOKES_COLD, Q_SCATTER_RT, Q_STOKES_RT],
    );
    for j in 0..grid.count {
        table.push(vec![
            grid.at(j),
            scatter.values()[j],
            stokes.values()[j],
            scatter_rt.values()[j],
            stokes_rt.values()[j],
        ]);
    }
    let mut summary = Summary::new();
    summary.insert("grid_points".into(), json!(grid.count));
    summary.insert("stokes_offset_hz".into(), json!(STOKES_OFFSET_HZ));
    describe(&mut summary, "q_scatter_cold", &scatter);
    describe(&mut summary, "q_stokes_cold", &stokes);
    describe(&mut summary, "q_scatter_rt", &scatter_rt);
    describe(&mut summary, "q_stokes_rt", &stokes_rt);
    width_ratio(&mut summary, &scatter, &stokes);
    Ok(ScenarioOutput { tables: vec![table], summary })
}

fn sbr_sweep(config: &ScenarioConfig, cal: &Calibration) -> ScenarioResult {
    let grid = grid_of(config)?;
    let setup = Setup::new(cal)?;
    let rows = cold_sweep(config, &grid, &[ETA_COLD, Q_SCATTER_COLD, Q_STOKES_COLD], |d| {
        let eta = setup.efficiency(d)?;
        let (s, k) = setup.background(d)?;
        Ok(vec![eta, s, k])
    })?;
    let eta = column(&grid, &rows, 0)?;
    let scatter = column(&grid, &rows, 1)?;
    let stokes = column(&grid, &rows, 2)?;

    let room = cal.room_model()?;
    let eta_rt = room.compose(&eta)?;
    let t_rt = medium_transmission(&grid, &cal.transmission_source()?)?;
    let eta_t = eta_rt.mul(&t_rt)?;
    let bg = &cal.data.background;
    let rails = if bg.dual_rail { 2.0 } else { 1.0 };
    let factor = rails / bg.suppression;
    let scatter_rt = room.compose(&scatter)?;
    let stokes_rt = room.compose(&stokes)?;
    let total_rt = scatter_rt.add(&stokes_rt)?;
    let floor = resonance_floor(&total_rt, bg.floor_fraction)?;
    let q_rt = total_rt.scaled(factor);
    let report = sbr_curve(&eta_rt, &t_rt, &q_rt, floor)?;

    let mut table = Table::new(
        config.scenario.as_str(),
        &["delta[Hz]", "eta_t[arb]", Q_SCATTER_RT, Q_STOKES_RT, Q_RT, SBR],
    );
    for j in 0..grid.count {
        table.push(vec![
            grid.at(j),
            eta_t.values()[j],
            scatter_rt.values()[j] * factor,
            stokes_rt.values()[j] * factor,
            q_rt.values()[j],
            report.sbr_curve.values()[j],
        ]);
    }
    let mut summary = Summary::new();
    summary.insert("grid_points".into(), json!(grid.count));
    summary.insert("optimal_delta_hz".into(), json!(report.optimal_delta));
    summary.insert("optimal_side".into(), json!(side(report.optimal_delta)));
    summary.insert("sbr_at_optimum".into(), json!(report.sbr_at_optimum));
    summary.insert("sbr_at_resonance".into(), json!(at_resonance(&report.sbr_curve)));
    summary.insert("floor".into(), json!(floor));
    summary.insert("background_factor".into(), json!(factor));
    summary.insert("dual_rail".into(), json!(bg.dual_rail));
    summary.insert("suppression".into(), json!(bg.suppression));
    describe(&mut summary, "eta_t", &eta_t);
    describe(&mut summary, "q_scatter_cold", &scatter);
    describe(&mut summary, "q_stokes_cold", &stokes);
    width_ratio(&mut summary, &scatter, &stokes);
    Ok(ScenarioOutput { tables: vec![table], summary })
}

fn etalon_scan_run(config: &ScenarioConfig, cal: &Calibration) -> ScenarioResult {
    let grid = grid_of(config)?;
    let setup = Setup::new(cal)?;
    let rows = cold_sweep(config, &grid, &[Q_SCATTER_COLD, Q_STOKES_COLD], |d| {
        let (s, k) = setup.background(d)?;
        Ok(vec![s, k])
    })?;
    let scatter = column(&grid, &rows, 0)?;
    let stokes_cold = column(&grid, &rows, 1)?;
    let stokes = stokes_cold.relabelled(STOKES_OFFSET_HZ);

    let cascade = cal.cascade()?;
    let scan = etalon_scan(&scatter, &stokes, &cascade, &grid)?;
    let mut swapped = cascade.clone();
    if let Some(last) = swapped.last_mut() {
        last.fsr = cal.data.filter.swap_fsr_hz;
    }
    let matched = filter_background(&scatter, &stokes, &cascade, 0.0)?;
    let mismatched = filter_background(&scatter, &stokes, &swapped, 0.0)?;
    let suppression_db = if matched.stokes > 0.0 && mismatched.stokes > 0.0 {
        json!(10.0 * (matched.stokes / mismatched.stokes).log10())
    } else {
        Value::Null
    };

    let mut table = Table::new(
        config.scenario.as_str(),
        &[
            "etalon_offset[Hz]",
            "scatter_filtered[photons]",
            "stokes_filtered[photons]",
            "total_filtered[photons]",
            "transmitted_fraction[1]",
        ],
    );
    for f in &scan {
        table.push(vec![f.offset, f.scatter, f.stokes, f.total(), f.normalized()]);
    }
    let mut emission = Table::new(
        format!("{}_emission", config.scenario),
        &["scatter_frequency[Hz]", Q_SCATTER_COLD, "stokes_frequency[Hz]", Q_STOKES_COLD],
    );
    for j in 0..grid.count {
        emission.push(vec![scatter.delta_at(j), scatter.values()[j], stokes.delta_at(j), stokes.values()[j]]);
    }

    let mut summary = Summary::new();
    summary.insert("grid_points".into(), json!(grid.count));
    summary.insert("stokes_offset_hz".into(), json!(stokes.delta0() - scatter.delta0()));
    summary.insert("etalon_fwhm_hz".into(), json!(etalon_fwhm_numeric(&cascade[0])));
    summary.insert("swap_fsr_hz".into(), json!(cal.data.filter.swap_fsr_hz));
    summary.insert("stokes_filtered_matched".into(), json!(matched.stokes));
    summary.insert("stokes_filtered_swapped".into(), json!(mismatched.stokes));
    summary.insert("stokes_suppression_db".into(), suppression_db);
    summary.insert("scatter_filtered_at_zero_offset".into(), json!(matched.scatter));
    describe(&mut summary, "q_scatter_cold", &scatter);
    describe(&mut summary, "q_stokes_cold", &stokes_cold);
    width_ratio(&mut summary, &scatter, &stokes_cold);
    Ok(ScenarioOutput { tables: vec![table, emission], summary })
}

/// Rotation angle of a proper rotation matrix, accurate near zero and π.
fn rotation_angle(m: &Matrix3<f64>) -> f64 {
    let skew = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]);
    (0.5 * skew.norm()).atan2(0.5 * (m.trace() - 1.0))
}

/// Six input states through a rotation plus a depolarising channel set by the
/// background ratio, followed by frame alignment.
fn qubit_fidelity(config: &ScenarioConfig, cal: &Calibration) -> ScenarioResult {
    let q = &cal.data.qubit;
    let bg = &cal.data.background;
    let rails = if bg.dual_rail { 2.0 } else { 1.0 };
    let sbr = q.sbr * bg.suppression / rails;
    let channel = sbr_to_fidelity(sbr, q.intrinsic_fidelity)?;
    let shrink = 2.0 * channel - 1.0;
    let axis = Unit::new_normalize(Vector3::from(q.rotation_axis));
    let truth = Rotation3::from_axis_angle(&axis, q.rotation_angle_deg.to_radians());

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = if q.noise > 0.0 {
        Some(Normal::new(0.0, q.noise).map_err(|e| HarnessError::config(format!("qubit.noise: {e}")))?)
    } else {
        None
    };

    let states = StokesVector::six_states();
    let inputs: Vec<StokesVector> = states.iter().map(|(_, s)| *s).collect();
    let mut outputs = Vec::with_capacity(inputs.len());
    for s in &inputs {
        let mut v = truth * (s.to_vector() * shrink);
        if let Some(n) = &noise {
            v += Vector3::new(n.sample(&mut rng), n.sample(&mut rng), n.sample(&mut rng));
        }
        if v.norm() > 1.0 {
            v /= v.norm();
        }
        outputs.push(StokesVector::from_vector(v)?);
    }
    let aligned = align_frames(&inputs, &outputs)?;
    let rotation_error = rotation_angle(&(aligned.rotation * truth.inverse().matrix())).to_degrees();
    let thresholds = classical_thresholds(q.mean_photons, q.efficiency)?;
    let report = FidelityReport::new(aligned.mean_fidelity, &thresholds)?;

    let mut table = Table::new(
        config.scenario.as_str(),
        &["s1_in[1]", "s2_in[1]", "s3_in[1]", "s1_out[1]", "s2_out[1]", "s3_out[1]", "fidelity[1]"],
    )
    .labelled("state");
    for (i, (label, s)) in states.iter().enumerate() {
        let o = &outputs[i];
        table.push_labelled(*label, vec![s.s1, s.s2, s.s3, o.s1, o.s2, o.s3, aligned.fidelities[i]]);
    }
    let mut summary = Summary::new();
    summary.insert("sbr_effective".into(), json!(sbr));
    summary.insert("channel_fidelity".into(), json!(channel));
    summary.insert("mean_fidelity".into(), json!(report.fidelity));
    summary.insert("qber".into(), json!(report.qber));
    summary.insert("intercept_resend_bound".into(), json!(thresholds.intercept_resend));
    summary.insert("nonunitary_bound".into(), json!(thresholds.nonunitary));
    summary.insert("margin_intercept_resend".into(), json!(report.vs_intercept_resend));
    summary.insert("margin_nonunitary".into(), json!(report.vs_nonunitary_bound));
    summary.insert("rotation_error_deg".into(), json!(rotation_error));
    summary.insert("seed".into(), json!(config.seed));
    Ok(ScenarioOutput { tables: vec![table], summary })
}

fn lifetime(cal: &Calibration) -> ScenarioResult {
    let l = &cal.data.lifetime;
    let points: Vec<(f64, f64)> = l.storage_times_s.iter().copied().zip(l.efficiencies.iter().copied()).collect();
    let fit = lifetime_fit(&points)?;
    let mut table = Table::new(
        ScenarioKind::LifetimeFit.as_str(),
        &["storage_time[s]", "efficiency[1]", "fitted_efficiency[1]", "log_residual[1]"],
    );
    for (i, (t, eta)) in points.iter().enumerate() {
        table.push(vec![*t, *eta, fit.eta0 * (-t / fit.tau_c).exp(), fit.residuals[i]]);
    }
    let mut summary = Summary::new();
    summary.insert("eta0".into(), json!(fit.eta0));
    summary.insert("tau_c_s".into(), json!(fit.tau_c));
    summary.insert("rms_residual".into(), json!(fit.rms_residual));
    summary.insert("points".into(), json!(points.len()));
    Ok(ScenarioOutput { tables: vec![table], summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifetime_runs_on_calibration_data() {
        let cal = Calibration::embedded().unwrap();
        let out = run_scenario(&ScenarioConfig::new(ScenarioKind::LifetimeFit), &cal).unwrap();
        let tau = out.summary["tau_c_s"].as_f64().unwrap();
        assert!((15e-6..25e-6).contains(&tau), "{tau}");
        assert_eq!(out.tables[0].len(), 4);
    }

    #[test]
    fn noiseless_qubit_recovers_channel() {
        let cal = Calibration::embedded().unwrap();
        let out = run_scenario(&ScenarioConfig::new(ScenarioKind::QubitFidelity), &cal).unwrap();
        let f = out.summary["mean_fidelity"].as_f64().unwrap();
        assert!((f - 3.4 / 3.9).abs() < 1e-9, "{f}");
        assert!(out.summary["rotation_error_deg"].as_f64().unwrap() < 1e-6);
        assert_eq!(out.tables[0].labels, ["H", "V", "D", "A", "R", "L"]);
    }

    #[test]
    fn rotation_angle_is_stable() {
        let axis = Unit::new_normalize(Vector3::new(1.0, 2.0, -0.5));
        for deg in [0.0, 1e-7, 2.0, 90.0, 179.0] {
            let r = Rotation3::from_axis_angle(&axis, f64::to_radians(deg));
            assert!((rotation_angle(r.matrix()).to_degrees() - deg).abs() < 1e-9, "{deg}");
        }
    }

    #[test]
    fn side_labels() {
        assert_eq!(side(-5.0e8), "red");
        assert_eq!(side(5.0e8), "blue");
        assert_eq!(side(0.0), "resonant");
    }
}
