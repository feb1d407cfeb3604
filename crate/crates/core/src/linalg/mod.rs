//! Dense complex linear algebra: matrices, Kronecker products, the Hermitian
//! eigensolver and the matrix exponential.

mod eig;
mod expm;
mod matrix;

pub use eig::{
    eig_residual, hermitian_eig, null_space, null_space_hermitian, unitarity_error, HermitianEig,
};
pub use expm::expm;
pub use matrix::{inner, kron, vector_norm, ComplexMatrix, C64, I, ONE, ZERO};

/// Maximum tolerated deviation from Hermiticity before an eigendecomposition.
pub const HERM_TOL: f64 = 1e-12;
/// Eigen-residual tolerance, relative to the matrix norm.
pub const EIG_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as zero when extracting null spaces.
pub const NULL_TOL: f64 = 1e-10;
