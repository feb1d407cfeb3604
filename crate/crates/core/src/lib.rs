//! Dissipative quenches of small XX spin-chain quantum batteries.
//!
//! A Gibbs state of the XX chain is evolved under a Lindblad generator whose
//! dissipator interpolates between local and collective decay and dephasing.
//! The crate provides the dense linear-algebra kernel, the model and channel
//! builders, propagation, ergotropy analysis, closed-form reference results
//! for the two-qubit chain, and a Jaynes-Cummings lossy-cavity check of the
//! local decay channel.
//!
//! Conventions used everywhere:
//! * single-qubit basis `(|e⟩, |g⟩)` with `σ_z|e⟩ = +|e⟩` and `σ⁻|e⟩ = |g⟩`;
//! * multi-qubit basis by Kronecker products, site 1 leftmost;
//! * column-stacking vectorization, `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

// Range checks are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod dynamics;
pub mod ergotropy;
pub mod error;
pub mod jc;
pub mod linalg;
pub mod model;
pub mod oracles;

pub use channels::{build_liouvillian, dissipator_apply, rate_matrix, ChannelSpec, Liouvillian, RateMatrix};
pub use dynamics::{detect_steady, propagate, propagate_rk4, propagate_to, SteadyState, TimeGrid, Trajectory};
pub use ergotropy::{ergotropy, passive_state, ErgotropyRecord};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use model::{gibbs_state, DensityMatrix, ModelSpec};
