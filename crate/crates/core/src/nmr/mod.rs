//! Idealized liquid-state NMR: diagonal Hamiltonians in the rotating frame,
//! instantaneous pulses and couplings, ideal gradient crushers, deviation
//! density matrices labeled by Pauli products, and FID/spectrum synthesis.
//!
//! Spins are 0-based in this API; spin 0 is the most significant bit of the
//! computational basis index.

mod dynamics;
mod pauli;
mod sequence;
mod spectrum;
mod system;

pub use dynamics::{
    apply_coupling, apply_rotation, build_hamiltonian, coupling_diagonal, evolve, gradient_crush,
    hamiltonian_diagonal, rotation_matrix, Axis,
};
pub use pauli::{conditional_block, pauli_decompose, pseudopure_init, PauliProductState, PauliSymbol};
pub use sequence::{parse_angle, run_events, run_sequence, Acquisition, Event, PulseSequence};
pub use spectrum::{fid, multiplet_lines, spectral_overlap, spectrum, zero_order_phase, Fid, Line, Spectrum};
pub use system::SpinSystem;
