use std::f64::consts::TAU;
use std::time::Instant;

use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64;
use rtqm_core::quantum::{evolve, evolve_with, AtomFieldParams, DensityMatrix, EvolveOptions, Level};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

#[test]
fn excited_population_follows_exponential_decay() {
    let p = AtomFieldParams::rb87_d1_rates();
    let rate = 2.0 * (p.gamma31 + p.gamma32);
    let t_end = 5.0 / rate;
    let dt = 2e-12;
    let opts = EvolveOptions { sample_stride: 500, positivity_stride: 500 };
    let traj = evolve_with(&DensityMatrix::pure(Level::Excited), &p, |_| c(0.0), |_| c(0.0), dt, t_end, opts).unwrap();
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let exact = (-rate * t).exp();
        let got = rho.population(Level::Excited);
        assert!((got - exact).abs() <= 1e-6 * exact, "t = {t}: {got} vs {exact}");
    }
    assert!(*traj.times.last().unwrap() > t_end - dt);
}

/// Dense Liouvillian assembled here from the operator form of the model,
/// column-stacked, independent of the library's builder.
fn oracle_liouvillian(p: &AtomFieldParams, ep: C, ec: C) -> SMatrix<C, 16, 16> {
    let mut h = Matrix4::<C>::zeros();
    h[(0, 0)] = c(-p.delta13 + p.delta);
    h[(1, 1)] = c(-(p.delta13 - p.delta23));
    h[(3, 3)] = c(-(p.delta13 - p.omega43));
    let raman = ec * (-p.alpha / (p.omega43 + p.delta) * p.omega_c);
    let couplings = [((2, 0), -ep * p.omega_p), ((2, 1), -ec * p.omega_c), ((3, 0), raman), ((3, 1), raman)];
    for ((i, j), v) in couplings {
        h[(i, j)] += v;
        h[(j, i)] += v.conj();
    }
    let jump = |to: usize, from: usize| {
        let mut l = Matrix4::<C>::zeros();
        l[(to, from)] = c(1.0);
        l
    };
    let jumps = [
        (jump(0, 2), p.gamma31),
        (jump(1, 2), p.gamma32),
        (jump(0, 3), p.gamma41),
        (jump(1, 3), p.gamma42),
        (jump(1, 0), p.gamma12),
    ];
    // vec(AXB) = (Bᵀ ⊗ A) vec(X)
    let id = Matrix4::<C>::identity();
    let mut big = (id.kronecker(&h) - h.transpose().kronecker(&id)) * C::new(0.0, -1.0);
    for (l, g) in jumps {
        let ldl = l.adjoint() * l;
        big += (l.conjugate().kronecker(&l) * c(2.0) - id.kronecker(&ldl) - ldl.transpose().kronecker(&id)) * c(g);
    }
    SMatrix::<C, 16, 16>::from_iterator(big.iter().copied())
}

#[test]
fn optical_pumping_matches_matrix_exponential() {
    let mut p = AtomFieldParams::zeroed(TAU * 80e6);
    p.omega_p = TAU * 2e6;
    p.omega_c = TAU * 6e6;
    p.alpha = 0.4 * p.omega43;
    p.gamma31 = TAU * 3e6;
    p.gamma32 = TAU * 3e6;
    p.gamma41 = TAU * 10e6;
    p.gamma42 = TAU * 10e6;
    p.gamma12 = TAU * 50e3;
    let p = p.with_laser_detuning(15e6);
    let (ep, ec) = (C::new(0.6, 0.2), c(1.0));

    let t_end = 400e-9;
    let rho0 = DensityMatrix::pure(Level::Ground1);
    let traj = evolve(&rho0, &p, |_| ep, |_| ec, 5e-11, t_end).unwrap();
    let (t, rho) = traj.last().unwrap();

    let l = oracle_liouvillian(&p, ep, ec) * c(t);
    let x0 = SVector::<C, 16>::from_column_slice(rho0.matrix().as_slice());
    let x = l.exp() * x0;
    let exact = Matrix4::<C>::from_column_slice(x.as_slice());
    let err = (rho.matrix() - exact).camax();
    assert!(err < 1e-8, "max deviation {err}");
    // Something actually happened: atoms were pumped out of |1⟩.
    assert!(exact[(0, 0)].re < 0.9);
}

#[test]
fn long_run_keeps_density_matrix_invariants() {
    let mut p = AtomFieldParams::rb87_d1_rates();
    p.omega_p = TAU * 1e6;
    p.omega_c = TAU * 10e6;
    p.alpha = 0.05 * p.omega43;
    let p = p.with_laser_detuning(-300e6);
    let dt = 2e-12;
    let steps = 100_000;
    let opts = EvolveOptions { sample_stride: 10_000, positivity_stride: 1 };
    let start = Instant::now();
    let traj = evolve_with(
        &DensityMatrix::pure(Level::Ground1),
        &p,
        |t| c((-(t - 1e-7).powi(2) / 1e-14).exp()),
        |_| c(1.0),
        dt,
        dt * steps as f64,
        opts,
    )
    .unwrap();
    let elapsed = start.elapsed();
    for rho in &traj.states {
        assert!((rho.trace() - 1.0).abs() <= 1e-9);
        assert!(rho.hermiticity_error() <= 1e-10);
        assert!(rho.min_eigenvalue() >= -1e-8);
    }
    assert!(elapsed.as_secs_f64() < 10.0, "{elapsed:?}");
}
