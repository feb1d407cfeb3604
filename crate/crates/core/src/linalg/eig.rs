//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot element `a_pq` with a
//! diagonal unitary, then annihilates the now-real pivot with an ordinary
//! plane rotation. The combined 2×2 unitary acting on columns `p, q` is
//!
//! ```text
//! G = [ c            s           ]
//!     [ -s e^{-iφ}   c e^{-iφ}   ]      φ = arg(a_pq)
//! ```
//!
//! and the update is `A ← G† A G`, `V ← V G`.

use super::matrix::{vector_norm, ComplexMatrix, C64, ZERO};
use super::{HERM_TOL, NULL_TOL};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// V Λ V†
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k])
                .sum()
        })
    }

    /// Applies `f` to the spectrum: V f(Λ) V†.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fl[k]).sum()
        })
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// The input is symmetrized before decomposition; inputs deviating from
/// Hermiticity by more than `HERM_TOL` (relative to max(1, max|m_ij|)) are
/// rejected.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let scale = m.max_abs().max(1.0);
    let deviation = m.hermiticity_deviation();
    if deviation > HERM_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }

    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let total = a.frobenius_norm();
    if total == 0.0 {
        return Ok(HermitianEig {
            eigenvalues: vec![0.0; n],
            eigenvectors: v,
        });
    }
    let threshold = (f64::EPSILON * total).powi(2);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= threshold {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let eigenvalues = pairs.iter().map(|&(l, _)| l).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, pairs[k].1)]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip pivots already negligible against both diagonal entries.
    if magnitude < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / magnitude;
    let theta = (aqq - app) / (2.0 * magnitude);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let e = phase.conj();
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = e * (-s);
    let g_qq = e * c;

    let n = a.rows();
    // A ← A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V ← V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Orthonormal basis of the eigenspace of a Hermitian PSD matrix with
/// eigenvalues below `tol`.
pub fn null_space_hermitian(m: &ComplexMatrix, tol: f64) -> Result<Vec<Vec<C64>>> {
    let eig = hermitian_eig(m)?;
    Ok(eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l < tol)
        .map(|(k, _)| eig.vector(k))
        .collect())
}

/// [`null_space_hermitian`] with the default `NULL_TOL`.
pub fn null_space(m: &ComplexMatrix) -> Result<Vec<Vec<C64>>> {
    null_space_hermitian(m, NULL_TOL)
}

/// max_k ‖M v_k − λ_k v_k‖ / max(‖M‖_F, 1).
pub fn eig_residual(m: &ComplexMatrix, eig: &HermitianEig) -> f64 {
    let scale = m.frobenius_norm().max(1.0);
    (0..eig.dim())
        .map(|k| {
            let v = eig.vector(k);
            let mv = m.matvec(&v);
            let r: Vec<C64> = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| a - b * eig.eigenvalues[k])
                .collect();
            vector_norm(&r)
        })
        .fold(0.0, f64::max)
        / scale
}

/// ‖V†V − I‖ max-abs.
pub fn unitarity_error(v: &ComplexMatrix) -> f64 {
    v.dagger()
        .matmul(v)
        .max_abs_diff(&ComplexMatrix::identity(v.cols()))
}
