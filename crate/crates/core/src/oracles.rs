//! Closed-form results for the two-qubit chain and dark-subspace analysis.
//!
//! Everything here is derived independently of the Liouvillian machinery:
//! the two-qubit equations of motion are assembled by hand as small real
//! linear systems and exponentiated directly. All coefficients assume `J = 1`.

use crate::error::{invalid, Error, Result};
use crate::linalg::{expm, null_space, ComplexMatrix, C64};
use crate::model::{gibbs_state, CollectiveOp, DensityMatrix, ModelSpec};

/// Index of each two-qubit basis state in the `(|e⟩,|g⟩)⊗(|e⟩,|g⟩)` ordering.
pub mod idx {
    pub const EE: usize = 0;
    pub const EG: usize = 1;
    pub const GE: usize = 2;
    pub const GG: usize = 3;
}

/// Populations and the one-excitation coherence `c = ρ_{eg,ge}` of a
/// two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitBlockState {
    pub p_gg: f64,
    pub p_eg: f64,
    pub p_ge: f64,
    pub p_ee: f64,
    pub c: C64,
}

impl TwoQubitBlockState {
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: "4x4 state".into(),
                found: format!("{0}x{0}", rho.dim()),
            });
        }
        let m = rho.matrix();
        Ok(Self {
            p_gg: m[(idx::GG, idx::GG)].re,
            p_eg: m[(idx::EG, idx::EG)].re,
            p_ge: m[(idx::GE, idx::GE)].re,
            p_ee: m[(idx::EE, idx::EE)].re,
            c: m[(idx::EG, idx::GE)],
        })
    }

    pub fn total(&self) -> f64 {
        self.p_gg + self.p_eg + self.p_ge + self.p_ee
    }

    /// Checks population bounds, normalization and `|c| ≤ √(p_eg p_ge)`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let pops = [self.p_gg, self.p_eg, self.p_ge, self.p_ee];
        pops.iter().all(|&p| (-tol..=1.0 + tol).contains(&p))
            && (self.total() - 1.0).abs() <= tol
            && self.c.norm() <= (self.p_eg.max(0.0) * self.p_ge.max(0.0)).sqrt() + 1e-10
    }

    /// Largest deviation from the matching entries of a 4×4 state.
    pub fn max_abs_diff(&self, rho: &DensityMatrix) -> Result<f64> {
        let other = Self::from_density(rho)?;
        Ok([
            (self.p_gg - other.p_gg).abs(),
            (self.p_eg - other.p_eg).abs(),
            (self.p_ge - other.p_ge).abs(),
            (self.p_ee - other.p_ee).abs(),
            (self.c - other.c).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max))
    }

    fn to_vector(self) -> [f64; 6] {
        [self.p_gg, self.p_eg, self.p_ge, self.p_ee, self.c.re, self.c.im]
    }

    fn from_vector(x: &[f64]) -> Self {
        Self {
            p_gg: x[0],
            p_eg: x[1],
            p_ge: x[2],
            p_ee: x[3],
            c: C64::new(x[4], x[5]),
        }
    }
}

/// x(t) = e^{At} x(0) for a 6×6 real system.
fn solve_linear(a: &[[f64; 6]; 6], x0: [f64; 6], t: f64) -> [f64; 6] {
    let m = ComplexMatrix::from_fn(6, 6, |i, j| C64::new(a[i][j] * t, 0.0));
    let x = expm(&m).matvec(&x0.map(|v| C64::new(v, 0.0)));
    let mut out = [0.0; 6];
    for (o, z) in out.iter_mut().zip(x) {
        *o = z.re;
    }
    out
}

// Variable order: p_gg, p_eg, p_ge, p_ee, Re c, Im c.
// The hopping terms −2i(c* − c) = −4 Im c and −2i(p_ge − p_eg) split as
// d(Re c)/dt ⊃ 0, d(Im c)/dt ⊃ −2(p_ge − p_eg).

/// Two qubits with parallel (local) decay at rate γ.
pub fn two_qubit_parallel_block(init: &TwoQubitBlockState, gamma: f64, t: f64) -> TwoQubitBlockState {
    let g = gamma;
    let a = [
        [0.0, g, g, 0.0, 0.0, 0.0],
        [0.0, -g, 0.0, g, 0.0, -4.0],
        [0.0, 0.0, -g, g, 0.0, 4.0],
        [0.0, 0.0, 0.0, -2.0 * g, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, -g, 0.0],
        [0.0, 2.0, -2.0, 0.0, 0.0, -g],
    ];
    TwoQubitBlockState::from_vector(&solve_linear(&a, init.to_vector(), t))
}

/// Two qubits with a single collective decay channel at rate γ.
pub fn two_qubit_collective_block(
    init: &TwoQubitBlockState,
    gamma: f64,
    t: f64,
) -> TwoQubitBlockState {
    let g = gamma;
    // γ(c + c*) = 2γ Re c
    let a = [
        [0.0, g, g, 0.0, 2.0 * g, 0.0],
        [0.0, -g, 0.0, g, -g, -4.0],
        [0.0, 0.0, -g, g, -g, 4.0],
        [0.0, 0.0, 0.0, -2.0 * g, 0.0, 0.0],
        [0.0, -g / 2.0, -g / 2.0, g, -g, 0.0],
        [0.0, 2.0, -2.0, 0.0, 0.0, -g],
    ];
    TwoQubitBlockState::from_vector(&solve_linear(&a, init.to_vector(), t))
}

/// Two qubits with parallel dephasing at rate γ.
pub fn dephasing_two_qubit_block(init: &TwoQubitBlockState, gamma: f64, t: f64) -> TwoQubitBlockState {
    let g4 = 4.0 * gamma;
    let a = [
        [0.0; 6],
        [0.0, 0.0, 0.0, 0.0, 0.0, -4.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 4.0],
        [0.0; 6],
        [0.0, 0.0, 0.0, 0.0, -g4, 0.0],
        [0.0, 2.0, -2.0, 0.0, 0.0, -g4],
    ];
    TwoQubitBlockState::from_vector(&solve_linear(&a, init.to_vector(), t))
}

/// Closed-form `s(t) = p_eg + p_ge` and real `c(t)` under collective decay,
/// valid for real `c(0)` and `p_eg(0) = p_ge(0)`.
pub fn two_qubit_collective_sc(init: &TwoQubitBlockState, gamma: f64, t: f64) -> (f64, f64) {
    let s0 = init.p_eg + init.p_ge;
    let c0 = init.c.re;
    let p0 = init.p_ee;
    let e = (-2.0 * gamma * t).exp();
    let s = 2.0 * gamma * p0 * t * e + 0.5 * s0 * (1.0 + e) + c0 * (e - 1.0);
    let c = gamma * p0 * t * e + 0.25 * s0 * (e - 1.0) + 0.5 * c0 * (e + 1.0);
    (s, c)
}

/// Two-qubit Gibbs partition function `Z = 2[cosh 2β + cosh 2βh]`.
pub fn two_qubit_partition(beta: f64, h: f64) -> f64 {
    2.0 * ((2.0 * beta).cosh() + (2.0 * beta * h).cosh())
}

/// Block state of the two-qubit Gibbs state, from its closed form.
pub fn two_qubit_gibbs_block(beta: f64, h: f64) -> TwoQubitBlockState {
    let z = two_qubit_partition(beta, h);
    let one = (2.0 * beta).cosh() / z;
    TwoQubitBlockState {
        p_gg: (2.0 * beta * h).exp() / z,
        p_eg: one,
        p_ge: one,
        p_ee: (-2.0 * beta * h).exp() / z,
        c: C64::new(-(2.0 * beta).sinh() / z, 0.0),
    }
}

/// Long-time weight of the one-excitation sector under collective decay,
/// `s_∞ = e^{2β}/Z`.
pub fn collective_s_infinity(beta: f64, h: f64) -> f64 {
    (2.0 * beta).exp() / two_qubit_partition(beta, h)
}

/// Steady-state eigenvalues `[λ₁, λ₂, λ₃, λ₄] = [0, 1 − s_∞, 0, s_∞]`.
pub fn collective_steady_spectrum(beta: f64, h: f64) -> Result<[f64; 4]> {
    if !(beta > 0.0) {
        return Err(invalid("beta", beta, "must be positive"));
    }
    let s = collective_s_infinity(beta, h);
    Ok([0.0, 1.0 - s, 0.0, s])
}

/// Time at which parallel decay activates ergotropy,
/// `t_c = ln[1 + tanh(β(1 − h))]/γ`.
pub fn t_c_analytic(beta: f64, h: f64, gamma: f64) -> Result<f64> {
    if !(h < 1.0) {
        return Err(invalid("h", h, "closed form requires h < J = 1"));
    }
    if !(beta > 0.0) {
        return Err(invalid("beta", beta, "must be positive"));
    }
    if !(gamma > 0.0) {
        return Err(invalid("gamma", gamma, "must be positive"));
    }
    Ok((1.0 + (beta - beta * h).tanh()).ln() / gamma)
}

fn passivity_margin(beta: f64, h: f64) -> f64 {
    (2.0 * beta).sinh() - (2.0 * beta * h).cosh()
}

/// Whether the two-qubit collective steady state is passive:
/// `sinh 2β ≥ cosh 2βh`.
pub fn passivity_predicate(beta: f64, h: f64) -> bool {
    passivity_margin(beta, h) >= 0.0
}

/// Root of `sinh 2β = cosh 2βh` on (0, 20] by bisection.
pub fn beta_critical(h: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&h) {
        return Err(invalid("h", h, "must lie in [0, 1)"));
    }
    let (mut lo, mut hi) = (0.0f64, 20.0f64);
    if passivity_margin(lo, h) >= 0.0 || passivity_margin(hi, h) <= 0.0 {
        return Err(Error::NoBracket {
            what: "sinh(2β) − cosh(2βh)",
            lo,
            hi,
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if passivity_margin(mid, h) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Span of states annihilated by the collective lowering operator.
#[derive(Debug, Clone)]
pub struct DarkSubspace {
    pub basis: Vec<Vec<C64>>,
    pub projector: ComplexMatrix,
}

impl DarkSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Tr[P_dark ρ]
    pub fn population(&self, rho: &DensityMatrix) -> f64 {
        rho.expectation(&self.projector).re
    }
}

fn require_unit_coupling(model: &ModelSpec) -> Result<()> {
    if model.j_coupling != 1.0 {
        return Err(invalid("j", model.j_coupling, "oracles assume J = 1"));
    }
    Ok(())
}

/// Kernel of `S⁺S⁻` (equivalently of `S⁻`).
pub fn dark_subspace(model: &ModelSpec) -> Result<DarkSubspace> {
    require_unit_coupling(model)?;
    let s_minus = model.collective_operator(CollectiveOp::Minus);
    let basis = null_space(&s_minus.dagger().matmul(&s_minus))?;
    let d = model.dim();
    let projector = basis
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, v| &acc + &ComplexMatrix::outer(v, v));
    Ok(DarkSubspace { basis, projector })
}

/// `p_dark(β)` together with the thermal averages entering its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkPopulation {
    pub beta: f64,
    pub p_dark: f64,
    /// ⟨H⟩ = Tr[H ρ_β]
    pub mean_energy: f64,
    /// ⟨H⟩_dark = Tr[P H ρ_β] / Tr[P ρ_β]
    pub mean_dark_energy: f64,
}

impl DarkPopulation {
    /// `dp_dark/dβ = −(⟨H⟩_dark − ⟨H⟩) p_dark`
    pub fn derivative(&self) -> f64 {
        -(self.mean_dark_energy - self.mean_energy) * self.p_dark
    }
}

pub fn dark_population(beta: f64, model: &ModelSpec, dark: &DarkSubspace) -> Result<DarkPopulation> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(invalid("beta", beta, "must be finite and non-negative"));
    }
    let h = model.hamiltonian();
    let rho = gibbs_state(&h, beta)?;
    let p_dark = dark.population(&rho);
    let mean_energy = rho.expectation(&h).re;
    let ph = dark.projector.matmul(&h);
    let mean_dark_energy = rho.expectation(&ph).re / p_dark;
    Ok(DarkPopulation {
        beta,
        p_dark,
        mean_energy,
        mean_dark_energy,
    })
}

/// Gibbs-state population inside the dark subspace.
pub fn p_dark(beta: f64, model: &ModelSpec) -> Result<f64> {
    let dark = dark_subspace(model)?;
    Ok(dark_population(beta, model, &dark)?.p_dark)
}
