//! Four-qubit demonstration that post-selection onto an entangled state
//! cannot send a usable signal to the past.
//!
//! Carrier 0 starts in `|0⟩`. Carriers 1 and 2 share a Bell pair and a CNOT
//! copies carrier 2 onto carrier 3 *before* the choice `a` is made. Then
//! carrier 0 is flipped if `a = 1`, and carriers 0 and 1 are Bell-measured
//! and post-selected on the same Bell state. Carriers 2 and 3 end in `|aa⟩`
//! with probability 1/4.

use super::{run_gate_circuit, GateCircuit, OutcomeReport};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PureState};
use crate::timeflow::BellState;

#[derive(Clone, Debug, PartialEq)]
pub struct AcausalReport {
    pub a: u8,
    pub bell: BellState,
    pub outcome: OutcomeReport,
    /// `|⟨aa|state⟩|²` for the state of carriers 2 and 3.
    pub fidelity: f64,
}

/// Gate list for choice `a` with the pair on carriers 1, 2 prepared in
/// `bell`, ending with a computational measurement of carriers 0, 1 after the
/// inverse entangler.
pub fn acausal_circuit(a: u8, bell: BellState) -> Result<GateCircuit> {
    if a > 1 {
        return Err(Error::InvalidArgument(format!("choice must be 0 or 1, got {a}")));
    }
    let x = ComplexMatrix::pauli_x();
    let mut c = GateCircuit::new(vec![2, 2, 2, 2])?;
    let (z_bit, x_bit) = bell.label_bits();
    if z_bit == 1 {
        c.gate(1, x.clone())?;
    }
    if x_bit == 1 {
        c.gate(2, x.clone())?;
    }
    c.gate(1, ComplexMatrix::hadamard())?.cnot(1, 2)?.cnot(2, 3)?;
    if a == 1 {
        c.gate(0, x)?;
    }
    c.cnot(0, 1)?.gate(0, ComplexMatrix::hadamard())?.measure(vec![0, 1])?;
    Ok(c)
}

pub fn acausal_experiment(a: u8) -> Result<AcausalReport> {
    acausal_experiment_with(a, BellState::PhiPlus)
}

pub fn acausal_experiment_with(a: u8, bell: BellState) -> Result<AcausalReport> {
    let circuit = acausal_circuit(a, bell)?;
    let input = PureState::basis(16, 0)?;
    let mut outcomes = run_gate_circuit(&circuit, &input)?;
    let (z, x) = bell.label_bits();
    let outcome = outcomes
        .remove(&vec![z, x])
        .ok_or_else(|| Error::InvalidCircuit(format!("post-selection on {} never succeeds", bell.name())))?;
    let target = PureState::basis(4, 3 * a as usize)?;
    let fidelity = target.inner(&outcome.state).norm_sqr();
    Ok(AcausalReport { a, bell, outcome, fidelity })
}
