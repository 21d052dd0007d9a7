use num_complex::Complex64;

use super::hamiltonian::build_hamiltonian;
use super::lindblad::lindblad_rhs;
use super::params::AtomFieldParams;
use super::state::{hermiticity_error, DensityMatrix, HamiltonianMatrix, Operator, POSITIVITY_TOL, TRACE_TOL};
use crate::error::{Error, Result};

/// Upper bound on dt · (fastest rate) accepted by the integrator.
pub const STABILITY_LIMIT: f64 = 0.1;

const STEP_HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Keep every n-th state in the trajectory (the final state is always kept).
    pub sample_stride: usize,
    /// Check positivity every n-th step. Trace and Hermiticity are checked every step.
    pub positivity_stride: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            sample_stride: 1,
            positivity_stride: 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &DensityMatrix)> {
        self.times.last().copied().zip(self.states.last())
    }
}

/// Eigenvalue spread bound (Gershgorin) of a Hermitian matrix.
fn spectral_spread(h: &Operator) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for i in 0..4 {
        let radius: f64 = (0..4).filter(|&j| j != i).map(|j| h[(i, j)].norm()).sum();
        let centre = h[(i, i)].re;
        hi = hi.max(centre + radius);
        lo = lo.min(centre - radius);
    }
    hi - lo
}

fn decay_rate(params: &AtomFieldParams) -> f64 {
    let ground = if params.symmetric_ground_decoherence { 2.0 } else { 1.0 } * 2.0 * params.gamma12;
    [
        2.0 * (params.gamma31 + params.gamma32),
        2.0 * (params.gamma41 + params.gamma42),
        ground,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn rate_of(h: &HamiltonianMatrix, params: &AtomFieldParams) -> f64 {
    spectral_spread(h.matrix()).max(decay_rate(params))
}

/// Fastest rate of the field-free generator: detuning spread and population decays.
pub fn max_rate(params: &AtomFieldParams) -> Result<f64> {
    let zero = Complex64::new(0.0, 0.0);
    let h = build_hamiltonian(params, zero, zero)?;
    Ok(rate_of(&h, params))
}

/// Integrates the master equation with classical RK4 from t = 0 to `t_end`.
///
/// Every stored sample satisfies the density-matrix invariants; the run aborts
/// with [`Error::InvariantViolation`] otherwise.
pub fn evolve<P, C>(
    rho0: &DensityMatrix,
    params: &AtomFieldParams,
    e_p: P,
    e_c: C,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory>
where
    P: Fn(f64) -> Complex64,
    C: Fn(f64) -> Complex64,
{
    evolve_with(rho0, params, e_p, e_c, dt, t_end, EvolveOptions::default())
}

pub fn evolve_with<P, C>(
    rho0: &DensityMatrix,
    params: &AtomFieldParams,
    e_p: P,
    e_c: C,
    dt: f64,
    t_end: f64,
    options: EvolveOptions,
) -> Result<Trajectory>
where
    P: Fn(f64) -> Complex64,
    C: Fn(f64) -> Complex64,
{
    params.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", format!("must be > 0, got {dt}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::param("t_end", format!("must be >= 0, got {t_end}")));
    }
    let product = dt * max_rate(params)?;
    if product >= STABILITY_LIMIT {
        return Err(Error::StabilityGuard {
            product,
            limit: STABILITY_LIMIT,
        });
    }

    let sample_stride = options.sample_stride.max(1);
    let positivity_stride = options.positivity_stride.max(1);
    let n_steps = (t_end / dt).round() as usize;
    let trace0 = rho0.trace();

    let hamiltonian = |t: f64| build_hamiltonian(params, e_p(t), e_c(t));
    let half = Complex64::new(0.5 * dt, 0.0);
    let full = Complex64::new(dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);

    let mut traj = Trajectory::default();
    traj.times.reserve(n_steps / sample_stride + 2);
    traj.states.reserve(n_steps / sample_stride + 2);
    traj.times.push(0.0);
    traj.states.push(*rho0);

    let mut rho = *rho0.matrix();
    for step in 0..n_steps {
        let t = step as f64 * dt;
        let h0 = hamiltonian(t)?;
        let hm = hamiltonian(t + 0.5 * dt)?;
        let h1 = hamiltonian(t + dt)?;

        let product = dt * rate_of(&hm, params);
        if product >= STABILITY_LIMIT {
            return Err(Error::StabilityGuard {
                product,
                limit: STABILITY_LIMIT,
            });
        }

        let k1 = lindblad_rhs(&rho, &h0, params);
        let k2 = lindblad_rhs(&(rho + k1 * half), &hm, params);
        let k3 = lindblad_rhs(&(rho + k2 * half), &hm, params);
        let k4 = lindblad_rhs(&(rho + k3 * full), &h1, params);
        rho += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * sixth;

        let t_next = (step + 1) as f64 * dt;
        check_step(&rho, trace0, t_next, (step + 1) % positivity_stride == 0)?;

        if (step + 1) % sample_stride == 0 || step + 1 == n_steps {
            traj.times.push(t_next);
            traj.states.push(DensityMatrix::from_matrix_unchecked(rho));
        }
    }
    Ok(traj)
}

fn check_step(rho: &Operator, trace0: f64, time: f64, positivity: bool) -> Result<()> {
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Instability {
            time,
            detail: "non-finite density-matrix element".into(),
        });
    }
    let tr = rho.trace().re;
    if (tr - trace0).abs() > TRACE_TOL {
        return Err(Error::InvariantViolation {
            time,
            detail: format!("trace drifted to {tr} from {trace0}"),
        });
    }
    let herm = hermiticity_error(rho);
    if herm > STEP_HERMITIAN_TOL {
        return Err(Error::InvariantViolation {
            time,
            detail: format!("Hermiticity error {herm:e}"),
        });
    }
    if positivity {
        let min_eig = DensityMatrix::from_matrix_unchecked(*rho).min_eigenvalue();
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvariantViolation {
                time,
                detail: format!("negative eigenvalue {min_eig:e}"),
            });
        }
    }
    Ok(())
}
