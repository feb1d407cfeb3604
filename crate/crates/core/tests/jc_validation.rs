use ergoquench_core::jc::{
    compare_jc, effective_atom_evolution, jc_full_evolution, jc_hamiltonian, JCSpec,
};
use ergoquench_core::linalg::{hermitian_eig, ComplexMatrix};
use ergoquench_core::{gibbs_state, DensityMatrix, TimeGrid, Trajectory};

const RATIOS: [f64; 6] = [1.0, 5.0, 10.0, 20.0, 50.0, 100.0];

fn excited() -> DensityMatrix {
    DensityMatrix::basis(2, 0).unwrap()
}

fn assert_physical(traj: &Trajectory) {
    for rho in &traj.states {
        let dev = rho.deviation();
        assert!(dev.trace < 1e-9 && dev.hermiticity < 1e-9 && dev.min_eigenvalue > -1e-9);
    }
}

#[test]
fn resonant_one_excitation_block_splits_by_coupling() {
    let spec = JCSpec::resonant(0.7, 1.0).unwrap();
    let h = jc_hamiltonian(&spec);
    let block = ComplexMatrix::from_fn(2, 2, |i, j| h[(i + 1, j + 1)]);
    let eig = hermitian_eig(&block).unwrap();
    let centre = spec.omega_q / 2.0;
    assert!((eig.eigenvalues[0] - (centre - 0.7)).abs() < 1e-12);
    assert!((eig.eigenvalues[1] - (centre + 0.7)).abs() < 1e-12);
}

#[test]
fn full_model_from_excited_state_stays_diagonal() {
    let grid = TimeGrid::new(40.0, 0.05).unwrap();
    for ratio in RATIOS {
        let spec = JCSpec::resonant(1.0, ratio).unwrap();
        let traj = jc_full_evolution(&spec, &excited(), &grid).unwrap();
        assert_physical(&traj);
        for rho in &traj.states {
            let m = rho.matrix();
            assert!(m[(0, 1)].norm() < 1e-12);
            assert!((m[(0, 0)].re + m[(1, 1)].re - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn effective_model_decays_exponentially() {
    let spec = JCSpec::new(9.0, 10.0, 0.5, 3.0).unwrap();
    let grid = TimeGrid::new(30.0, 0.5).unwrap();
    let traj = effective_atom_evolution(&spec, &excited(), &grid).unwrap();
    assert_physical(&traj);
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let expected = (-spec.gamma_eff() * t).exp();
        assert!((rho.matrix()[(0, 0)].re - expected).abs() < 1e-12);
        assert!(rho.matrix()[(0, 1)].norm() < 1e-12);
    }
}

#[test]
fn effective_model_accepts_thermal_atoms() {
    let spec = JCSpec::resonant(1.0, 20.0).unwrap();
    let sz = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
    let thermal = gibbs_state(&sz, 0.3).unwrap();
    let p0 = thermal.matrix()[(0, 0)].re;
    let grid = TimeGrid::new(40.0, 0.5).unwrap();
    let traj = effective_atom_evolution(&spec, &thermal, &grid).unwrap();
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        assert!((rho.matrix()[(0, 0)].re - p0 * (-spec.gamma_eff() * t).exp()).abs() < 1e-12);
    }
}

#[test]
fn very_lossy_cavity_reaches_the_adiabatic_limit() {
    let spec = JCSpec::resonant(1.0, 1e4).unwrap();
    let t_max = 8.0 / spec.gamma_eff();
    let grid = TimeGrid::new(t_max, 1.0).unwrap();
    let traj = jc_full_evolution(&spec, &excited(), &grid).unwrap();
    // ‖L·dt‖ ~ 1e4 puts the per-step roundoff near 1e-12; over 2·10⁴ steps
    // the trace drifts by ~1e-8.
    assert!(traj.worst_deviation().trace < 1e-7);
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let expected = (-spec.gamma_eff() * t).exp();
        assert!((rho.matrix()[(0, 0)].re - expected).abs() < 1e-3);
    }
}

#[test]
fn agreement_improves_with_cavity_loss() {
    let base = JCSpec::resonant(1.0, 1.0).unwrap();
    let slowest = base.with_kappa(RATIOS[5]).unwrap().gamma_eff();
    let grid = TimeGrid::covering(8.0 / slowest, 0.05).unwrap();
    let table = compare_jc(&base, &RATIOS, &grid).unwrap();
    let devs: Vec<f64> = table.iter().map(|r| r.max_deviation).collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    assert!(devs[0] > 10.0 * devs[5]);
    for row in &table {
        assert_physical(&row.full);
        assert_physical(&row.effective);
    }
}

#[test]
fn uncoupled_atom_has_no_deviation() {
    let base = JCSpec::new(10.0, 10.0, 0.0, 1.0).unwrap();
    let grid = TimeGrid::new(10.0, 0.5).unwrap();
    let table = compare_jc(&base, &RATIOS, &grid).unwrap();
    assert!(table.iter().all(|r| r.max_deviation < 1e-12));
}
