mod common;

use common::{gaussian_matrix, random_hermitian, rng};
use ergoquench_core::linalg::{
    eig_residual, expm, hermitian_eig, kron, null_space, unitarity_error, ComplexMatrix, C64,
    EIG_TOL,
};
use ergoquench_core::model::CollectiveOp;
use ergoquench_core::ModelSpec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigen_residuals_are_small(seed in any::<u64>(), dim in 2usize..=16) {
        let m = random_hermitian(&mut rng(seed), dim);
        let eig = hermitian_eig(&m).unwrap();
        prop_assert!(eig_residual(&m, &eig) < EIG_TOL);
        prop_assert!(unitarity_error(&eig.eigenvectors) < 1e-10);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!(eig.reconstruct().max_abs_diff(&m) < 1e-10 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expm_of_anti_hermitian_is_unitary(seed in any::<u64>(), dim in 1usize..=16, scale in 0.01f64..50.0) {
        let h = random_hermitian(&mut rng(seed), dim).scale_real(scale);
        let u = expm(&h.scale(C64::new(0.0, 1.0)));
        prop_assert!(unitarity_error(&u) < 1e-9);
    }

    #[test]
    fn expm_inverse_pair(seed in any::<u64>(), dim in 1usize..=12) {
        let m = gaussian_matrix(&mut rng(seed), dim);
        let prod = expm(&m).matmul(&expm(&m.scale_real(-1.0)));
        prop_assert!(prod.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-9);
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3, dc in 1usize..=3) {
        let mut r = rng(seed);
        let a = gaussian_matrix(&mut r, da);
        let b = gaussian_matrix(&mut r, db);
        let c = gaussian_matrix(&mut r, dc);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c, d) = (
            gaussian_matrix(&mut r, 2),
            gaussian_matrix(&mut r, 3),
            gaussian_matrix(&mut r, 2),
            gaussian_matrix(&mut r, 3),
        );
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

#[test]
fn random_eight_by_eight_reconstructs() {
    let m = random_hermitian(&mut rng(8), 8);
    let eig = hermitian_eig(&m).unwrap();
    assert!(eig.reconstruct().max_abs_diff(&m) < 1e-10 * m.frobenius_norm());
}

#[test]
fn degenerate_spectrum_is_resolved() {
    let u = common::random_unitary(&mut rng(3), 6);
    let d = ComplexMatrix::from_real_diag(&[1.0, 1.0, 1.0, -2.0, -2.0, 5.0]);
    let m = u.matmul(&d).matmul(&u.dagger()).hermitian_part();
    let eig = hermitian_eig(&m).unwrap();
    let expected = [-2.0, -2.0, 1.0, 1.0, 1.0, 5.0];
    for (a, b) in eig.eigenvalues.iter().zip(expected) {
        assert!((a - b).abs() < 1e-10);
    }
    assert!(unitarity_error(&eig.eigenvectors) < 1e-10);
}

#[test]
fn two_qubit_dark_kernel_matches_brute_force() {
    let model = ModelSpec::new(2, 0.1).unwrap();
    let s = model.collective_operator(CollectiveOp::Minus);
    let kernel = null_space(&s.dagger().matmul(&s)).unwrap();
    assert_eq!(kernel.len(), 2);

    // Brute force: in the ordering (ee, eg, ge, gg) the kernel is spanned
    // by |gg⟩ and (|eg⟩ − |ge⟩)/√2.
    let r = 1.0 / 2f64.sqrt();
    let gg = [0.0, 0.0, 0.0, 1.0].map(|x| C64::new(x, 0.0));
    let anti = [0.0, r, -r, 0.0].map(|x| C64::new(x, 0.0));
    let projector = kernel
        .iter()
        .fold(ComplexMatrix::zeros(4, 4), |acc, v| &acc + &ComplexMatrix::outer(v, v));
    let expected = &ComplexMatrix::outer(&gg, &gg) + &ComplexMatrix::outer(&anti, &anti);
    assert!(projector.max_abs_diff(&expected) < 1e-12);
}

#[test]
fn four_qubit_kernel_has_six_vectors() {
    let model = ModelSpec::new(4, 0.1).unwrap();
    let s = model.collective_operator(CollectiveOp::Minus);
    assert_eq!(null_space(&s.dagger().matmul(&s)).unwrap().len(), 6);
}
