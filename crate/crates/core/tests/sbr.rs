use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rtqm_core::sbr::{align_frames, fidelity, lifetime_fit, StokesVector};

fn six() -> Vec<StokesVector> {
    StokesVector::six_states().iter().map(|s| s.1).collect()
}

fn apply(r: &Matrix3<f64>, s: &StokesVector, shrink: f64) -> StokesVector {
    StokesVector::from_vector(r * s.to_vector() * shrink).unwrap()
}

fn angle_between(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    let rel = a.transpose() * b;
    ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

#[test]
fn quarter_turn_about_s3_is_recovered() {
    let truth = *Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_2).matrix();
    let ins = six();
    let outs: Vec<_> = ins.iter().map(|s| apply(&truth, s, 1.0)).collect();
    let a = align_frames(&ins, &outs).unwrap();
    assert!((a.rotation - truth).norm() < 1e-10);
    assert!((a.mean_fidelity - 1.0).abs() < 1e-10);
    assert!((a.rotation.determinant() - 1.0).abs() < 1e-10);
    assert!((a.rotation.transpose() * a.rotation - Matrix3::identity()).norm() < 1e-10);
}

#[test]
fn shrunk_noisy_outputs_give_rotation_within_two_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let axis = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let truth = *Rotation3::new(axis.normalize() * rng.gen_range(0.0..3.0)).matrix();
        let ins = six();
        let outs: Vec<_> = ins
            .iter()
            .map(|s| {
                let noise = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                StokesVector::from_vector(truth * s.to_vector() * 0.6 + noise * 0.02).unwrap()
            })
            .collect();
        let a = align_frames(&ins, &outs).unwrap();
        assert!(angle_between(&a.rotation, &truth).to_degrees() < 2.0);
        assert!((a.rotation.determinant() - 1.0).abs() < 1e-10);
        // Pure inputs, output length 0.6: F = (1 + 0.6)/2.
        assert!((a.mean_fidelity - 0.8).abs() < 0.02);
    }
}

#[test]
fn reflected_data_still_yields_proper_rotation() {
    let ins = six();
    let outs: Vec<_> = ins.iter().map(|s| StokesVector::new(s.s1, s.s2, -s.s3).unwrap()).collect();
    let a = align_frames(&ins, &outs).unwrap();
    assert!((a.rotation.determinant() - 1.0).abs() < 1e-10);
}

#[test]
fn fidelity_bounds_and_symmetry_over_many_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if v.norm() <= 1.0 {
            return StokesVector::from_vector(v).unwrap();
        }
    };
    for _ in 0..100_000 {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let f = fidelity(&a, &b).unwrap();
        assert_eq!(f, fidelity(&b, &a).unwrap());
        assert!((0.0..=1.0).contains(&f));
    }
}

#[test]
fn storage_time_series_fit() {
    let pts = [(1e-6, 0.11), (14e-6, 0.056), (28e-6, 0.031), (42e-6, 0.011)];
    let fit = lifetime_fit(&pts).unwrap();

    // Closed-form normal equations for y = a + b·t with y = ln η.
    let n = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1.ln()));
    let (stt, sty) = pts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0 * p.0, acc.1 + p.0 * p.1.ln()));
    let b = (n * sty - st * sy) / (n * stt - st * st);
    let a = (sy - b * st) / n;
    assert!((fit.tau_c - (-1.0 / b)).abs() <= 1e-9 * fit.tau_c);
    assert!((fit.eta0 - a.exp()).abs() <= 1e-9 * fit.eta0);
    assert!((15e-6..=25e-6).contains(&fit.tau_c), "{}", fit.tau_c);
    assert_eq!(fit.residuals.len(), 4);
    assert!(fit.rms_residual > 0.0);
}
