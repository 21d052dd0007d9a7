use std::collections::hash_map::{Entry, HashMap};

use log::{debug, warn};
use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{build_hamiltonian, liouvillian, vec_index, AtomFieldParams, DensityMatrix, Level};

use super::medium::MediumGrid;
use super::protocol::StorageProtocol;
use super::pulse::PulseEnvelope;

type C64 = Complex64;
type Vec16 = SVector<C64, 16>;
type Mat16 = SMatrix<C64, 16, 16>;

const I: C64 = C64::new(0.0, 1.0);
const RHO31: usize = 2; // vec_index(2, 0)
const RHO42: usize = 7; // vec_index(3, 1)
const RHO33: usize = 10; // vec_index(2, 2)
const CHECK_STRIDE: usize = 64;
const TRACE_DRIFT_LIMIT: f64 = 1e-6;
/// Largest tolerated RMS bandwidth as a fraction of the sampling rate.
const MAX_BANDWIDTH_FRACTION: f64 = 0.05;
/// Largest tolerated optical depth per slice.
const MAX_SLICE_OD: f64 = 1.0;

/// Outcome of one propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageResult {
    pub probe_in: PulseEnvelope,
    /// Probe at the cell exit.
    pub probe_out: PulseEnvelope,
    /// Stokes field at the cell exit.
    pub stokes_out: PulseEnvelope,
    /// Spontaneous photons per second reaching the detected mode.
    pub scatter_rate: Vec<f64>,
    /// Retrieval window [start, end) (s).
    pub roi: (f64, f64),
}

/// Photons detected in the retrieval window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundPhotons {
    pub scatter: f64,
    pub stokes: f64,
}

impl BackgroundPhotons {
    pub fn total(&self) -> f64 {
        self.scatter + self.stokes
    }
}

impl StorageResult {
    pub fn efficiency(&self) -> Result<f64> {
        storage_efficiency(self)
    }

    pub fn background(&self) -> Result<BackgroundPhotons> {
        let (start, end) = self.roi;
        let stokes = self
            .stokes_out
            .energy_between(start, end)
            .ok_or_else(|| Error::EmptyWindow(format!("no samples in [{start:e}, {end:e}) s")))?;
        let dt = self.probe_out.dt();
        let scatter = self
            .scatter_rate
            .iter()
            .enumerate()
            .filter(|(n, _)| {
                let t = self.probe_out.time(*n);
                t >= start && t < end
            })
            .map(|(_, r)| r * dt)
            .sum();
        Ok(BackgroundPhotons { scatter, stokes })
    }
}

/// Retrieved probe energy in the window divided by the input energy, clamped to [0, 1].
pub fn storage_efficiency(result: &StorageResult) -> Result<f64> {
    let (start, end) = result.roi;
    let input = result.probe_in.energy();
    if !(input > 0.0) {
        return Err(Error::param("probe", "input pulse carries no energy"));
    }
    let out = result
        .probe_out
        .energy_between(start, end)
        .ok_or_else(|| Error::EmptyWindow(format!("no samples in [{start:e}, {end:e}) s")))?;
    let eta = out / input;
    if !(0.0..=1.0).contains(&eta) {
        warn!("storage efficiency {eta:.6} outside [0, 1]; clamped");
    }
    Ok(eta.clamp(0.0, 1.0))
}

/// Exact one-step maps for a fixed control amplitude:
/// ρ(t+dt) = M·ρ(t) + Φ·f for a forcing f held constant over the step.
struct StepMaps {
    m: Mat16,
    phi: Mat16,
}

impl StepMaps {
    fn new(params: &AtomFieldParams, control: f64, dt: f64) -> Result<Self> {
        let h = build_hamiltonian(params, C64::new(0.0, 0.0), C64::new(control, 0.0))?;
        let l = liouvillian(&h, params);
        let mut aug = SMatrix::<C64, 32, 32>::zeros();
        aug.fixed_view_mut::<16, 16>(0, 0).copy_from(&(l * C64::new(dt, 0.0)));
        aug.fixed_view_mut::<16, 16>(0, 16)
            .copy_from(&(Mat16::identity() * C64::new(dt, 0.0)));
        let e = aug.exp();
        let m: Mat16 = e.fixed_view::<16, 16>(0, 0).into_owned();
        let phi: Mat16 = e.fixed_view::<16, 16>(0, 16).into_owned();
        if m.iter().chain(phi.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Instability {
                time: 0.0,
                detail: format!("non-finite step map for control amplitude {control}"),
            });
        }
        Ok(Self { m, phi })
    }
}

/// −i[H_p, ρ] for the probe coupling H_p = −(a|3⟩⟨1| + a*|1⟩⟨3|).
fn probe_forcing(rho: &Vec16, a: C64) -> Vec16 {
    let ac = a.conj();
    let mut c = Vec16::zeros();
    for j in 0..4 {
        c[vec_index(2, j)] -= a * rho[vec_index(0, j)];
        c[vec_index(0, j)] -= ac * rho[vec_index(2, j)];
    }
    for i in 0..4 {
        c[vec_index(i, 0)] += a * rho[vec_index(i, 2)];
        c[vec_index(i, 2)] += ac * rho[vec_index(i, 0)];
    }
    c * (-I)
}

fn ground_state() -> Vec16 {
    Vec16::from_column_slice(DensityMatrix::pure(Level::Ground1).matrix().as_slice())
}

fn check_resolution(protocol: &StorageProtocol, medium: &MediumGrid, params: &AtomFieldParams) -> Result<()> {
    let dt = protocol.probe.dt();
    let frac = protocol.probe.rms_bandwidth() * dt;
    if frac > MAX_BANDWIDTH_FRACTION {
        return Err(Error::GridResolution(format!(
            "probe RMS bandwidth is {frac:.3} of the sampling rate (limit {MAX_BANDWIDTH_FRACTION}); reduce dt"
        )));
    }
    let edge = protocol.control.edge;
    if edge > 0.0 && edge < 4.0 * dt {
        return Err(Error::GridResolution(format!(
            "control edge {edge:e} s spans fewer than 4 time steps of {dt:e} s"
        )));
    }
    if params.probe_coherence_rate() > 0.0 {
        let od_slice = medium.optical_depth(params) / medium.n_slices as f64;
        if od_slice > MAX_SLICE_OD {
            return Err(Error::GridResolution(format!(
                "optical depth per slice is {od_slice:.3} (limit {MAX_SLICE_OD}); use at least {} slices",
                (medium.optical_depth(params) / MAX_SLICE_OD).ceil()
            )));
        }
    }
    Ok(())
}

/// Propagates the protocol's probe through the medium, co-evolving every slice.
pub fn propagate(
    protocol: &StorageProtocol,
    medium: &MediumGrid,
    params: &AtomFieldParams,
) -> Result<StorageResult> {
    params.validate()?;
    medium.validate()?;
    protocol.validate()?;
    check_resolution(protocol, medium, params)?;

    let probe = &protocol.probe;
    let dt = probe.dt();
    let steps = probe.len();
    let ns = medium.n_slices;
    let dz = medium.dz();
    let kp = medium.coupling_prefactor * dz;
    let ks = medium.stokes_prefactor * dz;
    let emit = 2.0 * (params.gamma31 + params.gamma32) * medium.scatter_collection / ns as f64;

    let mut slices = vec![ground_state(); ns];
    let mut maps: HashMap<u64, StepMaps> = HashMap::new();

    let mut out = Vec::with_capacity(steps);
    let mut stokes = Vec::with_capacity(steps);
    let mut scatter = Vec::with_capacity(steps);

    for (n, &input) in probe.samples().iter().enumerate() {
        let t = probe.time(n);
        let amp = protocol.control.at(t + 0.5 * dt);
        let key = amp.to_bits();
        if let Entry::Vacant(slot) = maps.entry(key) {
            slot.insert(StepMaps::new(params, amp, dt)?);
        }
        let step = &maps[&key];

        let mut e = input;
        let mut es = C64::new(0.0, 0.0);
        let mut pop3 = 0.0;
        for rho in slices.iter_mut() {
            let e_next = e + I * kp * rho[RHO31];
            es += I * ks * rho[RHO42];
            pop3 += rho[RHO33].re;
            let drive = 0.5 * (e + e_next) * params.omega_p;
            let next = if drive == C64::new(0.0, 0.0) {
                step.m * *rho
            } else {
                step.m * *rho + step.phi * probe_forcing(rho, drive)
            };
            *rho = next;
            e = e_next;
        }
        out.push(e);
        stokes.push(es);
        scatter.push(emit * pop3);

        if n % CHECK_STRIDE == 0 || n + 1 == steps {
            check_slices(&slices, t + dt, &e, &es)?;
        }
    }
    debug!("propagated {steps} steps over {ns} slices with {} cached step maps", maps.len());

    Ok(StorageResult {
        probe_in: probe.clone(),
        probe_out: PulseEnvelope::from_parts_unchecked(out, dt, probe.t0()),
        stokes_out: PulseEnvelope::from_parts_unchecked(stokes, dt, probe.t0()),
        scatter_rate: scatter,
        roi: protocol.roi(),
    })
}

fn check_slices(slices: &[Vec16], time: f64, e: &C64, es: &C64) -> Result<()> {
    let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
    if !finite(e) || !finite(es) {
        return Err(Error::Instability { time, detail: "non-finite field".into() });
    }
    for (k, rho) in slices.iter().enumerate() {
        if !rho.iter().all(finite) {
            return Err(Error::Instability { time, detail: format!("non-finite state in slice {k}") });
        }
        let trace: f64 = (0..4).map(|i| rho[vec_index(i, i)].re).sum();
        if (trace - 1.0).abs() > TRACE_DRIFT_LIMIT {
            return Err(Error::Instability {
                time,
                detail: format!("trace drifted to {trace:.9} in slice {k}"),
            });
        }
    }
    Ok(())
}
