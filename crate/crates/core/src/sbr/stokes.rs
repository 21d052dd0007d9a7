use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Normalised Stokes vector (S1, S2, S3); |S| ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        let v = Self { s1, s2, s3 };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.s1, self.s2, self.s3].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidStokes("components must be finite".into()));
        }
        let n = self.norm_sqr();
        if n > 1.0 + NORM_TOL {
            return Err(Error::InvalidStokes(format!("|S|² = {n} exceeds 1")));
        }
        Ok(())
    }

    pub const fn h() -> Self {
        Self { s1: 1.0, s2: 0.0, s3: 0.0 }
    }
    pub const fn v() -> Self {
        Self { s1: -1.0, s2: 0.0, s3: 0.0 }
    }
    pub const fn d() -> Self {
        Self { s1: 0.0, s2: 1.0, s3: 0.0 }
    }
    pub const fn a() -> Self {
        Self { s1: 0.0, s2: -1.0, s3: 0.0 }
    }
    pub const fn r() -> Self {
        Self { s1: 0.0, s2: 0.0, s3: 1.0 }
    }
    pub const fn l() -> Self {
        Self { s1: 0.0, s2: 0.0, s3: -1.0 }
    }

    /// H, V, D, A, R, L.
    pub fn six_states() -> [(&'static str, Self); 6] {
        [
            ("H", Self::h()),
            ("V", Self::v()),
            ("D", Self::d()),
            ("A", Self::a()),
            ("R", Self::r()),
            ("L", Self::l()),
        ]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.s1 * other.s1 + self.s2 * other.s2 + self.s3 * other.s3
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.s1, self.s2, self.s3)
    }

    /// Builds from a vector, clipping norms that exceed 1 by rounding only.
    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        let v = if n > 1.0 && n <= 1.0 + NORM_TOL { v / n } else { v };
        Self::new(v.x, v.y, v.z)
    }
}

/// F = ½(1 + a·b + √((1−|a|²)(1−|b|²))).
pub fn fidelity(a: &StokesVector, b: &StokesVector) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    let mixed = ((1.0 - a.norm_sqr()) * (1.0 - b.norm_sqr())).max(0.0);
    Ok((0.5 * (1.0 + a.dot(b) + mixed.sqrt())).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameAlignment {
    /// Proper rotation taking input Stokes vectors onto the measured outputs.
    pub rotation: Matrix3<f64>,
    /// Outputs expressed in the input frame (Rᵀ·S_out).
    pub aligned_outputs: Vec<StokesVector>,
    pub fidelities: Vec<f64>,
    pub mean_fidelity: f64,
}

/// Best proper rotation between input and output Stokes vectors (Kabsch), which
/// maximises the mean fidelity because the mixedness term is rotation invariant.
pub fn align_frames(inputs: &[StokesVector], outputs: &[StokesVector]) -> Result<FrameAlignment> {
    if inputs.len() != outputs.len() {
        return Err(Error::param(
            "outputs",
            format!("{} inputs but {} outputs", inputs.len(), outputs.len()),
        ));
    }
    if inputs.len() < 3 {
        return Err(Error::param("inputs", "at least three input/output pairs are required"));
    }
    for s in inputs.iter().chain(outputs) {
        s.validate()?;
    }

    let mut spread = Matrix3::zeros();
    let mut cross = Matrix3::zeros();
    for (i, o) in inputs.iter().zip(outputs) {
        let (vi, vo) = (i.to_vector(), o.to_vector());
        spread += vi * vi.transpose();
        cross += vi * vo.transpose();
    }
    let sv = spread.symmetric_eigenvalues();
    let mut sv: Vec<f64> = sv.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if sv[0] <= 0.0 || sv[1] <= 1e-9 * sv[0] {
        return Err(Error::Degenerate("input Stokes vectors are collinear".into()));
    }

    let svd = cross.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d));
    let rotation = v * correction * u.transpose();

    let mut aligned_outputs = Vec::with_capacity(outputs.len());
    let mut fidelities = Vec::with_capacity(outputs.len());
    for (i, o) in inputs.iter().zip(outputs) {
        let back = StokesVector::from_vector(rotation.transpose() * o.to_vector())?;
        fidelities.push(fidelity(i, &back)?);
        aligned_outputs.push(back);
    }
    let mean_fidelity = fidelities.iter().sum::<f64>() / fidelities.len() as f64;
    Ok(FrameAlignment { rotation, aligned_outputs, fidelities, mean_fidelity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(a: f64, b: f64, c: f64) -> StokesVector {
        StokesVector::new(a, b, c).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        assert!((fidelity(&s(0.0, 0.0, 1.0), &s(0.0, 0.0, 1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&s(1.0, 0.0, 0.0), &s(-1.0, 0.0, 0.0)).unwrap().abs() < 1e-12);
        let f = fidelity(&s(0.0, 0.0, 0.8), &s(0.0, 0.0, 0.5)).unwrap();
        let oracle = 0.5 * (1.0 + 0.4 + (0.36f64 * 0.75).sqrt());
        assert!((f - oracle).abs() < 1e-12);
        assert!((f - 0.9598).abs() < 1e-4);
    }

    #[test]
    fn rejects_unphysical_vectors() {
        assert!(matches!(StokesVector::new(1.0, 0.1, 0.0), Err(Error::InvalidStokes(_))));
        assert!(StokesVector::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn identity_alignment() {
        let states: Vec<_> = StokesVector::six_states().iter().map(|x| x.1).collect();
        let a = align_frames(&states, &states).unwrap();
        assert!((a.rotation - Matrix3::identity()).norm() < 1e-12);
        assert!((a.mean_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_inputs_rejected() {
        let ins = [StokesVector::h(), StokesVector::v(), s(0.5, 0.0, 0.0)];
        assert!(matches!(align_frames(&ins, &ins), Err(Error::Degenerate(_))));
        assert!(align_frames(&ins[..2], &ins[..2]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn fidelity_symmetric_and_bounded(
            a in prop::array::uniform3(-1.0f64..1.0), b in prop::array::uniform3(-1.0f64..1.0),
            ra in 0.0f64..=1.0, rb in 0.0f64..=1.0,
        ) {
            let unit = |v: [f64; 3], r: f64| {
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-12);
                StokesVector::new(r * v[0] / n, r * v[1] / n, r * v[2] / n)
            };
            if let (Ok(x), Ok(y)) = (unit(a, ra), unit(b, rb)) {
                let f = fidelity(&x, &y).unwrap();
                prop_assert_eq!(f, fidelity(&y, &x).unwrap());
                prop_assert!((0.0..=1.0).contains(&f));
            }
        }
    }
}
