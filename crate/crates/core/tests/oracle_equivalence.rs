mod common;

use common::{BETAS, GAMMA, H_FIELD};
use ergoquench_core::linalg::{ComplexMatrix, C64};
use ergoquench_core::model::CollectiveOp;
use ergoquench_core::oracles::{
    beta_critical, collective_steady_spectrum, dark_population, dark_subspace,
    dephasing_two_qubit_block, p_dark, passivity_predicate, two_qubit_collective_block,
    two_qubit_collective_sc, two_qubit_gibbs_block, two_qubit_parallel_block,
    TwoQubitBlockState,
};
use ergoquench_core::{
    build_liouvillian, detect_steady, dissipator_apply, ergotropy, gibbs_state, propagate,
    propagate_to, rate_matrix, ChannelSpec, DensityMatrix, ModelSpec, TimeGrid, Trajectory,
};

fn two_qubit_run(spec: ChannelSpec, rho0: &DensityMatrix) -> Trajectory {
    let model = ModelSpec::new(2, H_FIELD).unwrap();
    let l = build_liouvillian(&model.hamiltonian(), &spec, &model).unwrap();
    propagate(&l, rho0, &TimeGrid::new(800.0, 0.5).unwrap()).unwrap()
}

fn gibbs2(beta: f64) -> DensityMatrix {
    gibbs_state(&ModelSpec::new(2, H_FIELD).unwrap().hamiltonian(), beta).unwrap()
}

#[test]
fn gibbs_block_matches_engine_gibbs_state() {
    for beta in BETAS {
        let oracle = two_qubit_gibbs_block(beta, H_FIELD);
        assert!(oracle.max_abs_diff(&gibbs2(beta)).unwrap() < 1e-14);
    }
}

#[test]
fn parallel_decay_matches_block_solution() {
    for beta in BETAS {
        let rho0 = gibbs2(beta);
        let init = TwoQubitBlockState::from_density(&rho0).unwrap();
        let traj = two_qubit_run(ChannelSpec::dissipation(GAMMA, 0.0).unwrap(), &rho0);
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            let oracle = two_qubit_parallel_block(&init, GAMMA, *t);
            assert!(oracle.max_abs_diff(rho).unwrap() < 1e-8, "beta={beta} t={t}");
        }
    }
}

#[test]
fn collective_decay_matches_closed_form() {
    for beta in BETAS {
        let rho0 = gibbs2(beta);
        let init = TwoQubitBlockState::from_density(&rho0).unwrap();
        let traj = two_qubit_run(ChannelSpec::dissipation(GAMMA, 1.0).unwrap(), &rho0);
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            let engine = TwoQubitBlockState::from_density(rho).unwrap();
            let (s, c) = two_qubit_collective_sc(&init, GAMMA, *t);
            assert!((engine.p_eg + engine.p_ge - s).abs() < 1e-8);
            assert!((engine.c.re - c).abs() < 1e-8);
            let block = two_qubit_collective_block(&init, GAMMA, *t);
            assert!(block.max_abs_diff(rho).unwrap() < 1e-8);
        }
    }
}

#[test]
fn parallel_dephasing_matches_block_solution() {
    let r = 0.5f64.sqrt();
    let plus = DensityMatrix::pure(&[C64::new(r, 0.0), C64::new(0.0, r)]).unwrap();
    let product = DensityMatrix::new(ergoquench_core::linalg::kron(plus.matrix(), plus.matrix()))
        .unwrap();
    let mut initial_states: Vec<DensityMatrix> = BETAS.iter().map(|&b| gibbs2(b)).collect();
    initial_states.push(product);
    for rho0 in initial_states {
        let init = TwoQubitBlockState::from_density(&rho0).unwrap();
        let traj = two_qubit_run(ChannelSpec::dephasing(GAMMA, 0.0).unwrap(), &rho0);
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            let oracle = dephasing_two_qubit_block(&init, GAMMA, *t);
            assert!(oracle.max_abs_diff(rho).unwrap() < 1e-8, "t={t}");
        }
    }
}

#[test]
fn dephasing_coherences_decay_with_the_number_of_differing_sites() {
    let r = 0.5f64.sqrt();
    let plus = [C64::new(r, 0.0), C64::new(r, 0.0)];
    let rho0 = DensityMatrix::new(ergoquench_core::linalg::kron(
        &ComplexMatrix::outer(&plus, &plus),
        &ComplexMatrix::outer(&plus, &plus),
    ))
    .unwrap();
    let traj = two_qubit_run(ChannelSpec::dephasing(GAMMA, 0.0).unwrap(), &rho0);
    // (ee | eg, ge) differ on one site, (ee | gg) on two.
    let single = |m: &ComplexMatrix| (m[(0, 1)].norm_sqr() + m[(0, 2)].norm_sqr()).sqrt();
    let s0 = single(rho0.matrix());
    let d0 = rho0.matrix()[(0, 3)].norm();
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let m = rho.matrix();
        assert!((single(m) - s0 * (-2.0 * GAMMA * t).exp()).abs() < 1e-12);
        assert!((m[(0, 3)].norm() - d0 * (-4.0 * GAMMA * t).exp()).abs() < 1e-12);
    }
}

#[test]
fn collective_steady_spectrum_matches_propagation() {
    for beta in BETAS {
        let traj = two_qubit_run(ChannelSpec::dissipation(GAMMA, 1.0).unwrap(), &gibbs2(beta));
        let steady = detect_steady(&traj, 1e-8);
        assert!(steady.converged);
        let mut oracle = collective_steady_spectrum(beta, H_FIELD).unwrap().to_vec();
        oracle.sort_by(f64::total_cmp);
        for (a, b) in steady.state.eigenvalues().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-6, "beta={beta}");
        }
    }
}

#[test]
fn steady_ergotropy_sign_agrees_with_passivity_predicate() {
    let model = ModelSpec::new(2, H_FIELD).unwrap();
    let h = model.hamiltonian();
    let l = build_liouvillian(&h, &ChannelSpec::dissipation(GAMMA, 1.0).unwrap(), &model).unwrap();
    for beta in [0.2, 0.3, 0.4, 0.5, 1.0, 2.0, 5.0] {
        let rho = propagate_to(&l, &gibbs_state(&h, beta).unwrap(), 800.0).unwrap();
        let e = ergotropy(&rho, &h).unwrap().ergotropy;
        if passivity_predicate(beta, H_FIELD) {
            assert!(e < 1e-4, "beta={beta}: {e}");
        } else {
            assert!(e > 1e-3, "beta={beta}: {e}");
        }
    }
    let b = beta_critical(H_FIELD, 1e-10).unwrap();
    assert!((0.43..=0.45).contains(&b));
}

#[test]
fn coarse_phase_diagram_agrees_away_from_the_boundary() {
    let n = 12;
    let betas: Vec<f64> = (0..n).map(|k| 0.1 + 2.9 * k as f64 / (n - 1) as f64).collect();
    let fields: Vec<f64> = (0..n).map(|k| 0.9 * k as f64 / (n - 1) as f64).collect();
    for &h in &fields {
        let model = ModelSpec::new(2, h).unwrap();
        let hm = model.hamiltonian();
        let l = build_liouvillian(&hm, &ChannelSpec::dissipation(GAMMA, 1.0).unwrap(), &model)
            .unwrap();
        let bc = beta_critical(h, 1e-12).unwrap();
        for &beta in &betas {
            if (beta - bc).abs() <= 2.9 / (n - 1) as f64 {
                continue;
            }
            let rho = propagate_to(&l, &gibbs_state(&hm, beta).unwrap(), 800.0).unwrap();
            let active = ergotropy(&rho, &hm).unwrap().ergotropy > 1e-4;
            assert_eq!(active, !passivity_predicate(beta, h), "beta={beta} h={h}");
        }
    }
}

#[test]
fn dark_subspace_invariants() {
    for (n, dim) in [(1usize, 1usize), (2, 2), (3, 3), (4, 6)] {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let dark = dark_subspace(&model).unwrap();
        assert_eq!(dark.dim(), dim);
        let s = model.collective_operator(CollectiveOp::Minus);
        for v in &dark.basis {
            let out = s.matvec(v);
            assert!(out.iter().all(|z| z.norm() < 1e-12));
        }
        let p = &dark.projector;
        assert!(p.matmul(p).max_abs_diff(p) < 1e-12);
        assert!(p.is_hermitian(1e-14));
        assert!((p.trace().re - dim as f64).abs() < 1e-12);

        // Collective decay leaves every dark state untouched.
        let rates = rate_matrix(GAMMA, 1.0, n).unwrap();
        let jumps = model.site_operators(ergoquench_core::model::SiteOp::Minus);
        for v in &dark.basis {
            let out = dissipator_apply(&rates, &jumps, &ComplexMatrix::outer(v, v)).unwrap();
            assert!(out.max_abs() < 1e-12);
        }
    }
}

#[test]
fn dark_population_grows_with_inverse_temperature() {
    let model = ModelSpec::new(4, H_FIELD).unwrap();
    assert!((p_dark(0.0, &model).unwrap() - 0.375).abs() < 1e-15);
    let dark = dark_subspace(&model).unwrap();
    let grid: Vec<f64> = (0..=48).map(|k| 0.2 + 0.1 * k as f64).collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|&b| dark_population(b, &model, &dark).unwrap().p_dark)
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]));
    assert!(values.iter().all(|p| (0.0..=1.0).contains(p)));
}

#[test]
fn dark_population_derivative_matches_finite_differences() {
    let model = ModelSpec::new(4, H_FIELD).unwrap();
    let dark = dark_subspace(&model).unwrap();
    let step = 1e-5;
    for beta in [0.2, 0.5, 1.0, 2.0, 5.0] {
        let analytic = dark_population(beta, &model, &dark).unwrap().derivative();
        let up = dark_population(beta + step, &model, &dark).unwrap().p_dark;
        let down = dark_population(beta - step, &model, &dark).unwrap().p_dark;
        let numeric = (up - down) / (2.0 * step);
        assert!((analytic - numeric).abs() < 1e-6, "beta={beta}");
    }
}
