#![allow(dead_code)]

use ergoquench_core::linalg::{expm, ComplexMatrix, C64};
use ergoquench_core::DensityMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    gaussian_matrix(rng, dim).hermitian_part()
}

pub fn random_density(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let a = gaussian_matrix(rng, dim);
    let m = a.matmul(&a.dagger());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}

pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim).scale_real(4.0);
    expm(&h.scale(C64::new(0.0, 1.0)))
}

pub const BETAS: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 5.0];
pub const H_FIELD: f64 = 0.1;
pub const GAMMA: f64 = 0.05;
