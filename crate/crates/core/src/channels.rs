//! Rate matrices, the mixed decay/dephasing dissipator and the vectorized
//! Liouvillian.
//!
//! With column stacking, `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`, so
//!
//! ```text
//! −i[H,ρ]              → −i (I ⊗ H − Hᵀ ⊗ I)
//! A_i ρ A_j†            → conj(A_j) ⊗ A_i
//! A_j†A_i ρ, ρ A_j†A_i  → I ⊗ (A_j†A_i),  (A_j†A_i)ᵀ ⊗ I
//! ```

use crate::error::{invalid, Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64, I};
use crate::model::{ModelSpec, SiteOp};

/// Dissipator parameters: overall rate, decay/dephasing mix `alpha`, and the
/// local↔collective interpolations of each channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub gamma: f64,
    pub alpha: f64,
    pub alpha_minus: f64,
    pub alpha_z: f64,
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(invalid(name, value, "out of [0,1]"))
    }
}

fn check_rate(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(invalid("gamma", gamma, "must be finite and non-negative"))
    }
}

impl ChannelSpec {
    pub fn new(gamma: f64, alpha: f64, alpha_minus: f64, alpha_z: f64) -> Result<Self> {
        check_rate(gamma)?;
        check_unit("alpha", alpha)?;
        check_unit("alpha_minus", alpha_minus)?;
        check_unit("alpha_z", alpha_z)?;
        Ok(Self {
            gamma,
            alpha,
            alpha_minus,
            alpha_z,
        })
    }

    /// Pure decay with mixing `alpha_minus` (0 local, 1 collective).
    pub fn dissipation(gamma: f64, alpha_minus: f64) -> Result<Self> {
        Self::new(gamma, 0.0, alpha_minus, 0.0)
    }

    /// Pure dephasing with mixing `alpha_z`.
    pub fn dephasing(gamma: f64, alpha_z: f64) -> Result<Self> {
        Self::new(gamma, 1.0, 0.0, alpha_z)
    }

    pub fn closed() -> Self {
        Self {
            gamma: 0.0,
            alpha: 0.0,
            alpha_minus: 0.0,
            alpha_z: 0.0,
        }
    }
}

/// Real symmetric N×N rate matrix `Γ_ij = γ[(1−a)δ_ij + a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RateMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }
}

pub fn rate_matrix(gamma: f64, alpha_interp: f64, n: usize) -> Result<RateMatrix> {
    check_rate(gamma)?;
    check_unit("alpha_interp", alpha_interp)?;
    if n == 0 {
        return Err(invalid("n", 0.0, "rate matrix needs at least one site"));
    }
    let mut data = vec![gamma * alpha_interp; n * n];
    for i in 0..n {
        data[i * n + i] = gamma;
    }
    Ok(RateMatrix { n, data })
}

/// `Σ_ij Γ_ij (A_i ρ A_j† − ½{A_j† A_i, ρ})`, evaluated directly on `rho`.
pub fn dissipator_apply(
    rates: &RateMatrix,
    jumps: &[ComplexMatrix],
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if jumps.len() != rates.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} jump operators", rates.n()),
            found: format!("{}", jumps.len()),
        });
    }
    let d = rho.rows();
    if let Some(bad) = jumps.iter().find(|a| a.rows() != d || a.cols() != d) {
        return Err(Error::DimensionMismatch {
            expected: format!("{d}x{d} jump operators"),
            found: format!("{}x{}", bad.rows(), bad.cols()),
        });
    }
    let daggers: Vec<ComplexMatrix> = jumps.iter().map(ComplexMatrix::dagger).collect();
    let mut out = ComplexMatrix::zeros(d, d);
    for (i, a_i) in jumps.iter().enumerate() {
        for (j, a_j_dag) in daggers.iter().enumerate() {
            let g = rates.get(i, j);
            if g == 0.0 {
                continue;
            }
            let sandwich = a_i.matmul(rho).matmul(a_j_dag);
            let number = a_j_dag.matmul(a_i);
            let anti = number.anticommutator(rho).scale_real(0.5);
            out += &(&sandwich - &anti).scale_real(g);
        }
    }
    Ok(out)
}

/// Generator of the master equation acting on column-stacked states.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    matrix: ComplexMatrix,
    dim_state: usize,
}

impl Liouvillian {
    /// `−i[H,·] + Σ_ij Γ_ij (A_i · A_j† − ½{A_j†A_i, ·})` summed over channels.
    pub fn from_channels(
        h_matrix: &ComplexMatrix,
        channels: &[(RateMatrix, Vec<ComplexMatrix>)],
    ) -> Result<Self> {
        if !h_matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square Hamiltonian".into(),
                found: format!("{}x{}", h_matrix.rows(), h_matrix.cols()),
            });
        }
        let d = h_matrix.rows();
        let id = ComplexMatrix::identity(d);
        let mut l = (&kron(&id, h_matrix) - &kron(&h_matrix.transpose(), &id)).scale(-I);

        for (rates, jumps) in channels {
            if jumps.len() != rates.n() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{} jump operators", rates.n()),
                    found: format!("{}", jumps.len()),
                });
            }
            for a in jumps {
                if a.rows() != d || a.cols() != d {
                    return Err(Error::DimensionMismatch {
                        expected: format!("{d}x{d} jump operators"),
                        found: format!("{}x{}", a.rows(), a.cols()),
                    });
                }
            }
            for (i, a_i) in jumps.iter().enumerate() {
                for (j, a_j) in jumps.iter().enumerate() {
                    let g = rates.get(i, j);
                    if g == 0.0 {
                        continue;
                    }
                    let number = a_j.dagger().matmul(a_i);
                    let mut term = kron(&a_j.conj(), a_i);
                    let half = C64::new(0.5, 0.0);
                    term = &term - &kron(&id, &number).scale(half);
                    term = &term - &kron(&number.transpose(), &id).scale(half);
                    l += &term.scale_real(g);
                }
            }
        }
        Ok(Self {
            matrix: l,
            dim_state: d,
        })
    }

    /// Wraps an arbitrary superoperator matrix (e.g. zero generator).
    pub fn from_matrix(matrix: ComplexMatrix, dim_state: usize) -> Result<Self> {
        if matrix.rows() != dim_state * dim_state || !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", dim_state * dim_state),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        Ok(Self { matrix, dim_state })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim_state(&self) -> usize {
        self.dim_state
    }

    /// unvec(L · vec(ρ))
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim_state || rho.cols() != self.dim_state {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.dim_state),
                found: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        let out = self.matrix.matvec(&rho.vec_columns());
        ComplexMatrix::unvec_columns(&out, self.dim_state)
    }
}

/// Jump operators and rate matrices for the mixed dissipator
/// `(1−α) D⁻ + α Dᶻ` of a chain.
pub fn channel_terms(
    spec: &ChannelSpec,
    model: &ModelSpec,
) -> Result<Vec<(RateMatrix, Vec<ComplexMatrix>)>> {
    let n = model.n_qubits;
    let mut terms = Vec::new();
    let w_decay = 1.0 - spec.alpha;
    if w_decay > 0.0 && spec.gamma > 0.0 {
        let rates = rate_matrix(spec.gamma, spec.alpha_minus, n)?.scaled(w_decay);
        terms.push((rates, model.site_operators(SiteOp::Minus)));
    }
    if spec.alpha > 0.0 && spec.gamma > 0.0 {
        let rates = rate_matrix(spec.gamma, spec.alpha_z, n)?.scaled(spec.alpha);
        terms.push((rates, model.site_operators(SiteOp::Z)));
    }
    Ok(terms)
}

/// `L = −i[H,·] + (1−α) D⁻ + α Dᶻ` for the chain described by `model`.
pub fn build_liouvillian(
    h_matrix: &ComplexMatrix,
    spec: &ChannelSpec,
    model: &ModelSpec,
) -> Result<Liouvillian> {
    if h_matrix.rows() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0} Hamiltonian", model.dim()),
            found: format!("{}x{}", h_matrix.rows(), h_matrix.cols()),
        });
    }
    Liouvillian::from_channels(h_matrix, &channel_terms(spec, model)?)
}

/// The dissipator alone, `(1−α) D⁻[ρ] + α Dᶻ[ρ]`, evaluated directly.
pub fn mixed_dissipator_apply(
    spec: &ChannelSpec,
    model: &ModelSpec,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let d = model.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (rates, jumps) in channel_terms(spec, model)? {
        out += &dissipator_apply(&rates, &jumps, rho)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gibbs_state, CollectiveOp};

    #[test]
    fn rate_matrix_limits() {
        let local = rate_matrix(0.05, 0.0, 3).unwrap();
        let collective = rate_matrix(0.05, 1.0, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(local.get(i, j), if i == j { 0.05 } else { 0.0 });
                assert_eq!(collective.get(i, j), 0.05);
            }
        }
        let half = rate_matrix(0.05, 0.5, 2).unwrap();
        assert_eq!(half.get(0, 0), 0.05);
        assert_eq!(half.get(0, 1), 0.025);
        assert_eq!(half.get(1, 0), 0.025);
        assert_eq!(half.get(1, 1), 0.05);
    }

    #[test]
    fn rate_matrix_rejects_out_of_range() {
        assert!(rate_matrix(0.05, 1.5, 2).is_err());
        assert!(rate_matrix(-1.0, 0.5, 2).is_err());
        assert!(ChannelSpec::new(0.05, 1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn single_qubit_decay_of_excited_state() {
        let model = ModelSpec::new(1, 0.1).unwrap();
        let rates = rate_matrix(0.05, 0.0, 1).unwrap();
        let rho = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let out = dissipator_apply(&rates, &model.site_operators(SiteOp::Minus), &rho).unwrap();
        let expected = ComplexMatrix::from_real_diag(&[-0.05, 0.05]);
        assert!(out.max_abs_diff(&expected) < 1e-16);
    }

    #[test]
    fn dephasing_leaves_diagonal_states_alone() {
        let model = ModelSpec::new(2, 0.1).unwrap();
        let rates = rate_matrix(0.05, 0.0, 2).unwrap();
        let rho = ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4]);
        let out = dissipator_apply(&rates, &model.site_operators(SiteOp::Z), &rho).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn collective_dephasing_annihilates_gibbs_states() {
        for n in [2, 4] {
            let model = ModelSpec::new(n, 0.1).unwrap();
            let h = model.hamiltonian();
            let rates = rate_matrix(0.05, 1.0, n).unwrap();
            for beta in [0.2, 1.0, 5.0] {
                let rho = gibbs_state(&h, beta).unwrap();
                let out =
                    dissipator_apply(&rates, &model.site_operators(SiteOp::Z), rho.matrix()).unwrap();
                assert!(out.max_abs() < 1e-12, "n={n} beta={beta}");
            }
        }
    }

    #[test]
    fn closed_system_generator() {
        let model = ModelSpec::new(2, 0.1).unwrap();
        let h = model.hamiltonian();
        let l = build_liouvillian(&h, &ChannelSpec::closed(), &model).unwrap();
        let id = ComplexMatrix::identity(4);
        let expected = (&kron(&id, &h) - &kron(&h.transpose(), &id)).scale(-I);
        assert!(l.matrix().max_abs_diff(&expected) < 1e-15);
        // −iK with K Hermitian, so L† = −L.
        assert!((&l.matrix().dagger() + l.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn collective_double_sum_matches_single_jump() {
        let model = ModelSpec::new(3, 0.1).unwrap();
        let h = model.hamiltonian();
        let spec = ChannelSpec::dissipation(0.05, 1.0).unwrap();
        let from_sum = build_liouvillian(&h, &spec, &model).unwrap();
        let s = model.collective_operator(CollectiveOp::Minus);
        let single = Liouvillian::from_channels(
            &h,
            &[(rate_matrix(0.05, 0.0, 1).unwrap(), vec![s])],
        )
        .unwrap();
        assert!(from_sum.matrix().max_abs_diff(single.matrix()) < 1e-14);
    }

    #[test]
    fn apply_checks_dimensions() {
        let model = ModelSpec::new(2, 0.1).unwrap();
        let l = build_liouvillian(&model.hamiltonian(), &ChannelSpec::closed(), &model).unwrap();
        assert!(l.apply(&ComplexMatrix::identity(3)).is_err());
        let wrong_h = ComplexMatrix::identity(8);
        assert!(build_liouvillian(&wrong_h, &ChannelSpec::closed(), &model).is_err());
    }
}
