//! Circuit evaluation: the teleportation-like circuit under tensor-product
//! and time-flow semantics, a gate-level simulator, the non-maximally
//! entangled loss analysis and the acausality demonstration.

mod acausal;
mod gates;
mod nonmax;
mod teleport;

pub use acausal::{acausal_circuit, acausal_experiment, acausal_experiment_with, AcausalReport};
pub use gates::{run_gate_circuit, GateCircuit, GateEvent};
pub use nonmax::{entanglement_entropy, nonmax_loss, schmidt_coefficients, transmission_bounds, NonmaxReport};
pub use teleport::{
    closed_form, forward_oracle, timeflow_eval, timeflow_trace, timeflow_trace_with, weyl_basis,
    weyl_operator, TeleportCircuit, TraceStep, TRACE_LABELS,
};

use crate::linalg::PureState;

/// Squared norms at or below this are treated as impossible outcomes.
pub const PROBABILITY_FLOOR: f64 = 1e-24;

/// A post-selected outcome: the unnormalized conditional state `raw`, its
/// probability `‖raw‖²` and the normalized `state`.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeReport {
    pub state: PureState,
    pub probability: f64,
    pub raw: PureState,
}

impl OutcomeReport {
    /// `None` when the outcome has (numerically) zero probability.
    pub fn from_raw(raw: PureState) -> Option<Self> {
        let probability = raw.norm_sqr();
        if probability <= PROBABILITY_FLOOR {
            return None;
        }
        let state = raw.normalized().ok()?;
        Some(Self { state, probability, raw })
    }
}
