mod common;

use common::{random_density, rng, BETAS, GAMMA, H_FIELD};
use ergoquench_core::channels::mixed_dissipator_apply;
use ergoquench_core::linalg::{ComplexMatrix, C64};
use ergoquench_core::model::{CollectiveOp, SiteOp};
use ergoquench_core::{
    build_liouvillian, dissipator_apply, ergotropy, gibbs_state, rate_matrix, ChannelSpec,
    Liouvillian, ModelSpec,
};
use proptest::prelude::*;

fn channel_strategy() -> impl Strategy<Value = ChannelSpec> {
    (0.0f64..0.3, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0)
        .prop_map(|(g, a, am, az)| ChannelSpec::new(g, a, am, az).unwrap())
}

/// Number of excited qubits in a basis index (bit 0 of each site is |e⟩).
fn excitations(index: usize, n: usize) -> usize {
    n - index.count_ones() as usize
}

/// σᶻ eigenvalue of `site` (1-based) in basis state `index`.
fn z_value(index: usize, site: usize, n: usize) -> f64 {
    if (index >> (n - site)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        seed in any::<u64>(),
        n in 1usize..=4,
        spec in channel_strategy(),
    ) {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let l = build_liouvillian(&model.hamiltonian(), &spec, &model).unwrap();
        let rho = random_density(&mut rng(seed), model.dim());
        let out = l.apply(rho.matrix()).unwrap();
        prop_assert!(out.trace().norm() < 1e-12);
        prop_assert!(out.hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn vectorized_generator_matches_direct_evaluation(
        seed in any::<u64>(),
        n in 1usize..=3,
        spec in channel_strategy(),
    ) {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let h = model.hamiltonian();
        let l = build_liouvillian(&h, &spec, &model).unwrap();
        let rho = random_density(&mut rng(seed), model.dim());
        let r = rho.matrix();

        let mut direct = h.commutator(r).scale(C64::new(0.0, -1.0));
        let decay = rate_matrix(spec.gamma, spec.alpha_minus, n).unwrap();
        let deph = rate_matrix(spec.gamma, spec.alpha_z, n).unwrap();
        direct += &dissipator_apply(&decay, &model.site_operators(SiteOp::Minus), r)
            .unwrap()
            .scale_real(1.0 - spec.alpha);
        direct += &dissipator_apply(&deph, &model.site_operators(SiteOp::Z), r)
            .unwrap()
            .scale_real(spec.alpha);

        prop_assert!(l.apply(r).unwrap().max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn dissipator_output_is_traceless_hermitian(seed in any::<u64>(), spec in channel_strategy()) {
        let model = ModelSpec::new(3, H_FIELD).unwrap();
        let rho = random_density(&mut rng(seed), model.dim());
        let d = mixed_dissipator_apply(&spec, &model, rho.matrix()).unwrap();
        prop_assert!(d.trace().norm() < 1e-12);
        prop_assert!(d.hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn rate_matrix_spectrum(gamma in 0.0f64..2.0, alpha in 0.0f64..=1.0, n in 1usize..=6) {
        let g = rate_matrix(gamma, alpha, n).unwrap();
        let m = ComplexMatrix::from_fn(n, n, |i, j| C64::new(g.get(i, j), 0.0));
        let eig = ergoquench_core::linalg::hermitian_eig(&m).unwrap();
        let low = gamma * (1.0 - alpha);
        let high = gamma * (1.0 - alpha + n as f64 * alpha);
        let tol = 1e-12 * (1.0 + gamma * n as f64);
        prop_assert!((eig.eigenvalues[n - 1] - high.max(low)).abs() < tol);
        let smallest = if n == 1 { high } else { low.min(high) };
        prop_assert!((eig.eigenvalues[0] - smallest).abs() < tol);
        prop_assert!(eig.eigenvalues[0] >= -tol);
    }
}

#[test]
fn elementwise_dephasing_law() {
    for n in [2usize, 4] {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let spec = ChannelSpec::dephasing(GAMMA, 0.0).unwrap();
        let d = model.dim();
        for a in 0..d {
            for b in 0..d {
                let mut unit = ComplexMatrix::zeros(d, d);
                unit[(a, b)] = C64::new(1.0, 0.0);
                let out = mixed_dissipator_apply(&spec, &model, &unit).unwrap();
                let rate: f64 = (1..=n)
                    .map(|s| z_value(a, s, n) * z_value(b, s, n) - 1.0)
                    .sum::<f64>()
                    * GAMMA;
                let differing = (a ^ b).count_ones() as f64;
                assert!((rate + 2.0 * GAMMA * differing).abs() < 1e-15);
                let mut expected = ComplexMatrix::zeros(d, d);
                expected[(a, b)] = C64::new(rate, 0.0);
                assert!(out.max_abs_diff(&expected) < 1e-15, "n={n} a={a} b={b}");
            }
        }
    }
}

#[test]
fn parallel_dissipation_never_raises_excitation_sector() {
    for n in [2usize, 3, 4] {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let l = build_liouvillian(
            &model.hamiltonian(),
            &ChannelSpec::dissipation(GAMMA, 0.0).unwrap(),
            &model,
        )
        .unwrap();
        let d = model.dim();
        let m = l.matrix();
        for row in 0..d * d {
            let (a, b) = (row % d, row / d);
            for col in 0..d * d {
                if m[(row, col)].norm() < 1e-15 {
                    continue;
                }
                let (c, e) = (col % d, col / d);
                let (na, nb, nc, ne) = (
                    excitations(a, n),
                    excitations(b, n),
                    excitations(c, n),
                    excitations(e, n),
                );
                assert!(na <= nc && nb <= ne, "n={n}: ({c},{e}) -> ({a},{b})");
                assert_eq!(nc - na, ne - nb);
            }
        }
    }
}

#[test]
fn collective_limits_match_single_jump_generators() {
    for n in [2usize, 3, 4] {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let h = model.hamiltonian();
        for (spec, op) in [
            (ChannelSpec::dissipation(GAMMA, 1.0).unwrap(), CollectiveOp::Minus),
            (ChannelSpec::dephasing(GAMMA, 1.0).unwrap(), CollectiveOp::Z),
        ] {
            let double_sum = build_liouvillian(&h, &spec, &model).unwrap();
            let single = Liouvillian::from_channels(
                &h,
                &[(rate_matrix(GAMMA, 0.0, 1).unwrap(), vec![model.collective_operator(op)])],
            )
            .unwrap();
            assert!(double_sum.matrix().max_abs_diff(single.matrix()) < 1e-14);
        }
    }
}

#[test]
fn closed_generator_is_commutator() {
    let model = ModelSpec::new(2, H_FIELD).unwrap();
    let h = model.hamiltonian();
    let l = build_liouvillian(&h, &ChannelSpec::closed(), &model).unwrap();
    let id = ComplexMatrix::identity(4);
    let expected = (&ergoquench_core::linalg::kron(&id, &h)
        - &ergoquench_core::linalg::kron(&h.transpose(), &id))
        .scale(C64::new(0.0, -1.0));
    assert!(l.matrix().max_abs_diff(&expected) < 1e-15);
    let il = l.matrix().scale(C64::new(0.0, 1.0));
    assert!(il.is_hermitian(1e-14));
}

#[test]
fn gibbs_states_are_stationary_under_collective_dephasing() {
    for n in [2usize, 4] {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let h = model.hamiltonian();
        let l = build_liouvillian(&h, &ChannelSpec::dephasing(GAMMA, 1.0).unwrap(), &model).unwrap();
        for beta in BETAS {
            let rho = gibbs_state(&h, beta).unwrap();
            assert!(l.apply(rho.matrix()).unwrap().max_abs() < 1e-14);
        }
    }
}

#[test]
fn hamiltonian_conserves_excitation_number() {
    for n in 1..=6 {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let sz = model.collective_operator(CollectiveOp::Z);
        assert!(model.hamiltonian().commutator(&sz).max_abs() < 1e-12, "n={n}");
    }
}

#[test]
fn gibbs_states_are_passive() {
    for n in [2usize, 4] {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let h = model.hamiltonian();
        for beta in BETAS {
            let rho = gibbs_state(&h, beta).unwrap();
            assert!(ergotropy(&rho, &h).unwrap().ergotropy < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gibbs_state_is_physical(log_beta in -8.0f64..6.0, n in 1usize..=4) {
        let model = ModelSpec::new(n, H_FIELD).unwrap();
        let beta = 10f64.powf(log_beta);
        let rho = gibbs_state(&model.hamiltonian(), beta).unwrap();
        let dev = rho.deviation();
        prop_assert!(dev.trace < 1e-10);
        prop_assert!(dev.hermiticity < 1e-10);
        prop_assert!(dev.min_eigenvalue > -1e-9);
    }
}

#[test]
fn zero_temperature_gibbs_is_ground_projector() {
    let model = ModelSpec::new(2, H_FIELD).unwrap();
    let h = model.hamiltonian();
    let rho = gibbs_state(&h, 1e6).unwrap();
    let eig = ergoquench_core::linalg::hermitian_eig(&h).unwrap();
    let ground = eig.vector(0);
    let projector = ComplexMatrix::outer(&ground, &ground);
    assert!(rho.matrix().max_abs_diff(&projector) < 1e-9);
}
