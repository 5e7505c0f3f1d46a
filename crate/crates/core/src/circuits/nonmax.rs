//! Transmission backward through a pair that is not maximally entangled.
//!
//! Post-selecting carrier 1 of `|Π⟩` on `|ψ⟩` leaves carrier 2 in
//! `Q_Π·ψ*`. For maximal `Π` this is `ψ*` scaled by `1/√d` for every input;
//! otherwise `M_Π` is not unitary and the transmitted weight depends on the
//! input, ranging over `[σ_min²/d, σ_max²/d]`.

use crate::error::Result;
use crate::linalg::PureState;
use crate::timeflow::{m_of_state, q_of_state, EntangledState};

#[derive(Clone, Debug, PartialEq)]
pub struct NonmaxReport {
    /// Singular values of `M_Π`, descending.
    pub singular_values: Vec<f64>,
    /// `Q_Π·ψ*`.
    pub raw: PureState,
    /// `‖raw‖²`.
    pub transmitted: f64,
}

pub fn nonmax_loss(pi: &EntangledState, psi: &PureState) -> Result<NonmaxReport> {
    let raw = psi.conjugate().apply(&q_of_state(pi))?;
    Ok(NonmaxReport {
        singular_values: m_of_state(pi).singular_values(),
        transmitted: raw.norm_sqr(),
        raw,
    })
}

/// Schmidt coefficients of `Π`, descending.
pub fn schmidt_coefficients(pi: &EntangledState) -> Vec<f64> {
    q_of_state(pi).singular_values()
}

/// Entanglement entropy in bits.
pub fn entanglement_entropy(pi: &EntangledState) -> f64 {
    schmidt_coefficients(pi)
        .iter()
        .map(|s| s * s)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Smallest and largest transmitted weight over all normalized inputs.
pub fn transmission_bounds(pi: &EntangledState) -> (f64, f64) {
    let s = schmidt_coefficients(pi);
    let min = s.last().copied().unwrap_or(0.0);
    (min * min, s[0] * s[0])
}
