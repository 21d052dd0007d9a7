use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense 4×4 complex operator on the atomic Hilbert space.
pub type Operator = Matrix4<Complex64>;

/// Atomic levels. `index()` is the 0-based matrix index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// |1⟩, ground state the probe starts from.
    Ground1,
    /// |2⟩, ground state reached by the control.
    Ground2,
    /// |3⟩, excited state.
    Excited,
    /// |4⟩, off-resonant virtual state.
    Virtual,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Ground1, Level::Ground2, Level::Excited, Level::Virtual];

    #[inline]
    pub const fn index(self) -> usize {
        match self {
            Level::Ground1 => 0,
            Level::Ground2 => 1,
            Level::Excited => 2,
            Level::Virtual => 3,
        }
    }
}

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-9;
pub(crate) const POSITIVITY_TOL: f64 = -1e-8;

/// Largest |ρᵢⱼ − conj(ρⱼᵢ)| over all entries.
pub(crate) fn hermiticity_error(m: &Operator) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in i..4 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Normalised atomic state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    /// Validates the invariants before wrapping `m`.
    pub fn new(m: Operator) -> Result<Self> {
        let herm = hermiticity_error(&m);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvariantViolation {
                time: 0.0,
                detail: format!("not Hermitian (error {herm:e})"),
            });
        }
        let rho = Self(m);
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvariantViolation {
                time: 0.0,
                detail: format!("trace {tr} != 1"),
            });
        }
        let min_eig = rho.min_eigenvalue();
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvariantViolation {
                time: 0.0,
                detail: format!("negative eigenvalue {min_eig:e}"),
            });
        }
        Ok(rho)
    }

    /// Wraps `m` without checks. Used by integrators that validate separately.
    pub fn from_matrix_unchecked(m: Operator) -> Self {
        Self(m)
    }

    /// Pure state |level⟩⟨level|.
    pub fn pure(level: Level) -> Self {
        let mut m = Operator::zeros();
        m[(level.index(), level.index())] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    /// Diagonal (incoherent) state with the given populations.
    pub fn diagonal(populations: [f64; 4]) -> Result<Self> {
        let mut m = Operator::zeros();
        for (i, p) in populations.iter().enumerate() {
            m[(i, i)] = Complex64::new(*p, 0.0);
        }
        Self::new(m)
    }

    #[inline]
    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_matrix(self) -> Operator {
        self.0
    }

    #[inline]
    pub fn element(&self, row: Level, col: Level) -> Complex64 {
        self.0[(row.index(), col.index())]
    }

    #[inline]
    pub fn population(&self, level: Level) -> f64 {
        self.0[(level.index(), level.index())].re
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(herm).eigenvalues.min()
    }
}

/// Atom-field Hamiltonian in the rotating frame (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMatrix(pub(crate) Operator);

impl HamiltonianMatrix {
    #[inline]
    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    #[inline]
    pub fn element(&self, row: Level, col: Level) -> Complex64 {
        self.0[(row.index(), col.index())]
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    /// Wraps an arbitrary Hermitian matrix (e.g. for property tests).
    pub fn from_hermitian(m: Operator) -> Result<Self> {
        let herm = hermiticity_error(&m);
        if herm > HERMITIAN_TOL * m.norm().max(1.0) {
            return Err(Error::param("hamiltonian", format!("not Hermitian (error {herm:e})")));
        }
        Ok(Self(m))
    }
}
