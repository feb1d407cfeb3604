//! The open-boundary XX chain, its spin operators and Gibbs states.

use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eig, kron, ComplexMatrix, C64, ONE, ZERO};

pub const MAX_QUBITS: usize = 6;

/// Chain size, hopping scale `J` and transverse field `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub n_qubits: usize,
    pub j_coupling: f64,
    pub field_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteOp {
    X,
    Y,
    Z,
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectiveOp {
    Minus,
    Z,
}

impl From<CollectiveOp> for SiteOp {
    fn from(op: CollectiveOp) -> Self {
        match op {
            CollectiveOp::Minus => SiteOp::Minus,
            CollectiveOp::Z => SiteOp::Z,
        }
    }
}

/// Single-qubit operator in the `(|e⟩, |g⟩)` basis.
pub fn pauli(kind: SiteOp) -> ComplexMatrix {
    let (a, b, c, d) = match kind {
        SiteOp::X => (ZERO, ONE, ONE, ZERO),
        SiteOp::Y => (ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO),
        SiteOp::Z => (ONE, ZERO, ZERO, -ONE),
        // σ⁻ = |g⟩⟨e|
        SiteOp::Minus => (ZERO, ZERO, ONE, ZERO),
        SiteOp::Plus => (ZERO, ONE, ZERO, ZERO),
    };
    ComplexMatrix::from_vec(2, 2, vec![a, b, c, d]).expect("2x2")
}

impl ModelSpec {
    /// Chain with `J = 1`.
    pub fn new(n_qubits: usize, field_h: f64) -> Result<Self> {
        Self::with_coupling(n_qubits, 1.0, field_h)
    }

    pub fn with_coupling(n_qubits: usize, j_coupling: f64, field_h: f64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(invalid("n_qubits", n_qubits as f64, "must be in 1..=6"));
        }
        if !j_coupling.is_finite() {
            return Err(invalid("j", j_coupling, "must be finite"));
        }
        if !(field_h.is_finite() && field_h >= 0.0) {
            return Err(invalid("h", field_h, "must be finite and non-negative"));
        }
        Ok(Self {
            n_qubits,
            j_coupling,
            field_h,
        })
    }

    /// Hilbert-space dimension 2^N.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at 1-based `site`.
    pub fn site_operator(&self, site: usize, kind: SiteOp) -> Result<ComplexMatrix> {
        if site == 0 || site > self.n_qubits {
            return Err(Error::SiteOutOfRange {
                site,
                n: self.n_qubits,
            });
        }
        let id = ComplexMatrix::identity(2);
        let op = pauli(kind);
        let mut out = if site == 1 { op.clone() } else { id.clone() };
        for k in 2..=self.n_qubits {
            out = kron(&out, if k == site { &op } else { &id });
        }
        Ok(out)
    }

    /// All `N` site operators of one kind, sites in order.
    pub fn site_operators(&self, kind: SiteOp) -> Vec<ComplexMatrix> {
        (1..=self.n_qubits)
            .map(|s| self.site_operator(s, kind).expect("site in range"))
            .collect()
    }

    /// `S^kind = Σ_i σ_i^kind`.
    pub fn collective_operator(&self, kind: CollectiveOp) -> ComplexMatrix {
        let d = self.dim();
        self.site_operators(kind.into())
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, op| &acc + op)
    }

    /// `H = J Σ_{i<N} (σˣ_i σˣ_{i+1} + σʸ_i σʸ_{i+1}) + h Σ_i σᶻ_i`, open boundary.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        let d = self.dim();
        let x = self.site_operators(SiteOp::X);
        let y = self.site_operators(SiteOp::Y);
        let z = self.site_operators(SiteOp::Z);
        let mut h = ComplexMatrix::zeros(d, d);
        for i in 0..self.n_qubits.saturating_sub(1) {
            let hop = &x[i].matmul(&x[i + 1]) + &y[i].matmul(&y[i + 1]);
            h += &hop.scale_real(self.j_coupling);
        }
        for zi in &z {
            h += &zi.scale_real(self.field_h);
        }
        h
    }
}

/// Shorthand for [`ModelSpec::hamiltonian`].
pub fn build_hamiltonian(spec: &ModelSpec) -> ComplexMatrix {
    spec.hamiltonian()
}

/// Bounds used when checking that a matrix is a physical state.
#[derive(Debug, Clone, Copy)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl StateTolerance {
    /// Construction-time bounds.
    pub const STRICT: Self = Self {
        hermiticity: 1e-10,
        trace: 1e-10,
        min_eigenvalue: -1e-9,
    };
    /// Error threshold during propagation.
    pub const PROPAGATION: Self = Self {
        hermiticity: 1e-6,
        trace: 1e-6,
        min_eigenvalue: -1e-6,
    };
}

/// Measured departures of a matrix from being a density matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StateDeviation {
    /// |Tr ρ − 1|
    pub trace: f64,
    /// max |ρ_ij − conj(ρ_ji)|
    pub hermiticity: f64,
    /// smallest eigenvalue of the Hermitian part
    pub min_eigenvalue: f64,
}

impl StateDeviation {
    pub fn of(m: &ComplexMatrix) -> Self {
        let min_eigenvalue = hermitian_eig(&m.hermitian_part())
            .map(|e| e.eigenvalues[0])
            .unwrap_or(f64::NEG_INFINITY);
        Self {
            trace: (m.trace() - ONE).norm(),
            hermiticity: m.hermiticity_deviation(),
            min_eigenvalue,
        }
    }

    /// Returns the first violated bound as `(what, deviation)`.
    pub fn violation(&self, tol: &StateTolerance) -> Option<(&'static str, f64)> {
        if !(self.hermiticity <= tol.hermiticity) {
            return Some(("hermiticity", self.hermiticity));
        }
        if !(self.trace <= tol.trace) {
            return Some(("unit trace", self.trace));
        }
        if !(self.min_eigenvalue >= tol.min_eigenvalue) {
            return Some(("positivity", -self.min_eigenvalue));
        }
        None
    }

    /// Worst-case merge of two deviation records.
    pub fn worst(self, other: Self) -> Self {
        Self {
            trace: self.trace.max(other.trace),
            hermiticity: self.hermiticity.max(other.hermiticity),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, &StateTolerance::STRICT, 0)
    }

    pub(crate) fn with_tolerance(
        matrix: ComplexMatrix,
        tol: &StateTolerance,
        step: usize,
    ) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        if let Some((what, deviation)) = StateDeviation::of(&matrix).violation(tol) {
            return Err(Error::InvariantViolation {
                step,
                what,
                deviation,
            });
        }
        Ok(Self { matrix })
    }

    /// Pure state |ψ⟩⟨ψ| (ψ is normalized here).
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = crate::linalg::vector_norm(psi);
        if norm == 0.0 {
            return Err(invalid("state norm", 0.0, "pure state vector must be nonzero"));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    /// The computational basis projector |k⟩⟨k|.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(invalid("basis index", k as f64, "outside the Hilbert space"));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Tr(ρ A)
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix[(i, k)] * op[(k, i)];
            }
        }
        acc
    }

    pub fn deviation(&self) -> StateDeviation {
        StateDeviation::of(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix)
            .expect("density matrices are Hermitian")
            .eigenvalues
    }
}

/// ρ_β = e^{−βH} / Tr e^{−βH}, built in the eigenbasis of `H` with the
/// ground energy subtracted so that β → ∞ is well defined.
pub fn gibbs_state(h_matrix: &ComplexMatrix, beta: f64) -> Result<DensityMatrix> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(invalid("beta", beta, "must be finite and non-negative"));
    }
    let eig = hermitian_eig(h_matrix)?;
    let ground = eig.eigenvalues[0];
    let boltzmann = |e: f64| (-beta * (e - ground)).exp();
    let z: f64 = eig.eigenvalues.iter().map(|&e| boltzmann(e)).sum();
    let rho = eig.apply(|e| boltzmann(e) / z);
    DensityMatrix::new(rho.hermitian_part())
}
