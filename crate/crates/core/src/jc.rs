//! Lossy-cavity Jaynes-Cummings model versus its adiabatically eliminated
//! effective atomic master equation.
//!
//! The cavity is truncated to `n ≤ 1`; the joint basis is
//! `{|g,0⟩, |e,0⟩, |g,1⟩, |e,1⟩}`. Reduced atomic states use the crate-wide
//! `(|e⟩, |g⟩)` ordering.

use crate::channels::{rate_matrix, Liouvillian};
use crate::dynamics::{propagate, TimeGrid, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64, ZERO};
use crate::model::{pauli, DensityMatrix, SiteOp, StateTolerance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JCSpec {
    pub omega_q: f64,
    pub omega_c: f64,
    pub g: f64,
    pub kappa: f64,
}

impl JCSpec {
    pub fn new(omega_q: f64, omega_c: f64, g: f64, kappa: f64) -> Result<Self> {
        for (name, v) in [("omega_q", omega_q), ("omega_c", omega_c)] {
            if !v.is_finite() {
                return Err(invalid(name, v, "must be finite"));
            }
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(invalid("g", g, "must be finite and non-negative"));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid("kappa", kappa, "must be positive"));
        }
        Ok(Self {
            omega_q,
            omega_c,
            g,
            kappa,
        })
    }

    /// On resonance with `ω_q = ω_c = 10 g`.
    pub fn resonant(g: f64, kappa: f64) -> Result<Self> {
        Self::new(10.0 * g, 10.0 * g, g, kappa)
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.omega_q, self.omega_c, self.g, kappa)
    }

    /// Δ = ω_c − ω_q
    pub fn delta(&self) -> f64 {
        self.omega_c - self.omega_q
    }

    /// Γ_eff = 4g²κ / (κ² + 4Δ²)
    pub fn gamma_eff(&self) -> f64 {
        let d = self.delta();
        4.0 * self.g * self.g * self.kappa / (self.kappa * self.kappa + 4.0 * d * d)
    }

    /// Lamb-shift energy of |e⟩, −g²Δ / (κ²/4 + Δ²).
    pub fn lamb_shift(&self) -> f64 {
        let d = self.delta();
        -self.g * self.g * d / (self.kappa * self.kappa / 4.0 + d * d)
    }
}

mod joint {
    pub const G0: usize = 0;
    pub const E0: usize = 1;
    pub const G1: usize = 2;
    pub const E1: usize = 3;
}

pub fn jc_hamiltonian(spec: &JCSpec) -> ComplexMatrix {
    let half = spec.omega_q / 2.0;
    let mut h = ComplexMatrix::from_real_diag(&[
        -half,
        half,
        spec.omega_c - half,
        spec.omega_c + half,
    ]);
    h[(joint::E0, joint::G1)] = C64::new(spec.g, 0.0);
    h[(joint::G1, joint::E0)] = C64::new(spec.g, 0.0);
    h
}

/// Truncated annihilation operator `a` on the joint space.
fn cavity_lowering() -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(4, 4);
    a[(joint::G0, joint::G1)] = C64::new(1.0, 0.0);
    a[(joint::E0, joint::E1)] = C64::new(1.0, 0.0);
    a
}

/// Maps a crate-ordered atom state `(e, g)` to the joint ordering `(g, e)`.
fn atom_to_joint_order(rho: &ComplexMatrix) -> ComplexMatrix {
    let flip = [1usize, 0];
    ComplexMatrix::from_fn(2, 2, |i, j| rho[(flip[i], flip[j])])
}

/// ρ_atom ⊗ |0⟩⟨0| in the joint basis.
fn joint_initial_state(rho0_atom: &DensityMatrix) -> Result<DensityMatrix> {
    if rho0_atom.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "2x2 atomic state".into(),
            found: format!("{0}x{0}", rho0_atom.dim()),
        });
    }
    // joint index = 2·photon + atom(g=0, e=1)
    let vacuum = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
    DensityMatrix::new(kron(&vacuum, &atom_to_joint_order(rho0_atom.matrix())))
}

/// Tr_cavity of a joint state, returned in `(e, g)` ordering.
pub fn trace_out_cavity(rho: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(reduce(rho))
}

fn reduce(rho: &DensityMatrix) -> ComplexMatrix {
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(2, 2);
    // crate index of atom state: e = 0, g = 1; joint atom index: g = 0, e = 1.
    for (ci, ja) in [(0usize, 1usize), (1, 0)] {
        for (cj, jb) in [(0usize, 1usize), (1, 0)] {
            let mut acc = ZERO;
            for n in 0..2 {
                acc += m[(2 * n + ja, 2 * n + jb)];
            }
            out[(ci, cj)] = acc;
        }
    }
    out.hermitian_part()
}

pub fn jc_liouvillian(spec: &JCSpec) -> Result<Liouvillian> {
    Liouvillian::from_channels(
        &jc_hamiltonian(spec),
        &[(rate_matrix(spec.kappa, 0.0, 1)?, vec![cavity_lowering()])],
    )
}

/// Full atom-cavity evolution from `ρ_atom ⊗ |0⟩⟨0|`, reduced to the atom.
pub fn jc_full_evolution(
    spec: &JCSpec,
    rho0_atom: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let joint = propagate(&jc_liouvillian(spec)?, &joint_initial_state(rho0_atom)?, grid)?;
    let states = joint
        .states
        .iter()
        .enumerate()
        .map(|(k, rho)| DensityMatrix::with_tolerance(reduce(rho), &StateTolerance::PROPAGATION, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: joint.times,
        states,
        metadata: None,
    })
}

pub fn effective_liouvillian(spec: &JCSpec) -> Result<Liouvillian> {
    let h_ls = ComplexMatrix::from_real_diag(&[spec.lamb_shift(), 0.0]);
    Liouvillian::from_channels(
        &h_ls,
        &[(rate_matrix(spec.gamma_eff(), 0.0, 1)?, vec![pauli(SiteOp::Minus)])],
    )
}

/// Atomic evolution under decay at Γ_eff plus the Lamb shift.
pub fn effective_atom_evolution(
    spec: &JCSpec,
    rho0_atom: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    if rho0_atom.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "2x2 atomic state".into(),
            found: format!("{0}x{0}", rho0_atom.dim()),
        });
    }
    propagate(&effective_liouvillian(spec)?, rho0_atom, grid)
}

#[derive(Debug, Clone)]
pub struct JcComparison {
    pub kappa_over_g: f64,
    pub full: Trajectory,
    pub effective: Trajectory,
    /// max_t |p_ee,full − p_ee,eff|
    pub max_deviation: f64,
}

fn excited_population(rho: &DensityMatrix) -> f64 {
    rho.matrix()[(0, 0)].re
}

/// Runs both descriptions from |e⟩ for each cavity-loss ratio.
pub fn compare_jc(
    spec_base: &JCSpec,
    kappa_over_g: &[f64],
    grid: &TimeGrid,
) -> Result<Vec<JcComparison>> {
    let excited = DensityMatrix::basis(2, 0)?;
    kappa_over_g
        .iter()
        .map(|&ratio| {
            if !(ratio > 0.0) {
                return Err(invalid("kappa/g", ratio, "must be positive"));
            }
            let kappa = if spec_base.g > 0.0 {
                ratio * spec_base.g
            } else {
                ratio
            };
            let spec = spec_base.with_kappa(kappa)?;
            let full = jc_full_evolution(&spec, &excited, grid)?;
            let effective = effective_atom_evolution(&spec, &excited, grid)?;
            let max_deviation = full
                .states
                .iter()
                .zip(&effective.states)
                .map(|(a, b)| (excited_population(a) - excited_population(b)).abs())
                .fold(0.0, f64::max);
            Ok(JcComparison {
                kappa_over_g: ratio,
                full,
                effective,
                max_deviation,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let spec = JCSpec::new(3.0, 5.0, 0.0, 1.0).unwrap();
        let h = jc_hamiltonian(&spec);
        assert_eq!(h, ComplexMatrix::from_real_diag(&[-1.5, 1.5, 3.5, 6.5]));
    }

    #[test]
    fn coupling_sits_between_e0_and_g1() {
        let spec = JCSpec::resonant(1.0, 5.0).unwrap();
        let h = jc_hamiltonian(&spec);
        assert_eq!(h[(1, 2)], C64::new(1.0, 0.0));
        assert_eq!(h[(2, 1)], C64::new(1.0, 0.0));
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn resonant_rates() {
        let spec = JCSpec::resonant(1.0, 10.0).unwrap();
        assert!((spec.gamma_eff() - 0.4).abs() < 1e-15);
        assert_eq!(spec.lamb_shift(), 0.0);
    }

    #[test]
    fn partial_trace_round_trip() {
        let mut m = ComplexMatrix::from_real_diag(&[0.3, 0.7]);
        m[(0, 1)] = C64::new(0.1, 0.2);
        m[(1, 0)] = C64::new(0.1, -0.2);
        let atom = DensityMatrix::new(m.clone()).unwrap();
        let joint = joint_initial_state(&atom).unwrap();
        let back = trace_out_cavity(&joint).unwrap();
        assert!(back.matrix().max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(JCSpec::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(JCSpec::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(JCSpec::new(f64::NAN, 1.0, 1.0, 1.0).is_err());
    }
}
