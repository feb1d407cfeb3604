//! Matrix exponential by scaling and squaring with the [13/13] Padé
//! approximant (Higham 2005).

use super::matrix::{solve, ComplexMatrix};

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn combine(terms: &[(f64, &ComplexMatrix)], n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for &(c, m) in terms {
        if c != 0.0 {
            out += &m.scale_real(c);
        }
    }
    out
}

/// e^m for a square matrix.
///
/// # Panics
/// If `m` is not square or contains non-finite entries.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "expm requires a square matrix");
    assert!(m.is_finite(), "expm requires finite entries");
    let n = m.rows();
    let norm = m.norm_1();
    if norm == 0.0 {
        return ComplexMatrix::identity(n);
    }

    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a = m.scale_real(0.5f64.powi(squarings as i32));

    let b = &PADE_13;
    let ident = ComplexMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let u_inner = a6.matmul(&combine(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n));
    let u_poly = &u_inner + &combine(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &ident)], n);
    let u = a.matmul(&u_poly);

    let v_inner = a6.matmul(&combine(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n));
    let v = &v_inner + &combine(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &ident)], n);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve(&q, &p).expect("Padé denominator is nonsingular for scaled input");
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    r
}
