//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Basis ordering: carrier 1 is the most significant index, so the basis
//! state `|c₁c₂…cₙ⟩` of qubits sits at index `Σ cᵢ·2^(n−i)`.

mod matrix;
mod state;

pub use matrix::{is_unitary, kron, unitarity_defect, ComplexMatrix};
pub use state::{
    apply_local, conjugate_local, embed_local, equal_up_to_global_phase, global_phase_deviation, left_apply_local,
    partial_trace, DensityMatrix, PureState,
};

pub use num_complex::Complex64;

/// Tolerance for algebraic identities.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Eigenvalue floor used when checking positivity.
pub const PSD_TOL: f64 = 1e-9;
