//! `timeflow acausal`: both branches of the four-qubit acausality circuit.

use serde::Serialize;

use timeflow_core::circuits::acausal_experiment_with;
use timeflow_core::timeflow::BellState;

use crate::error::CliResult;
use crate::output::{state_pairs, Report};

#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub a: u8,
    pub probability: f64,
    pub fidelity: f64,
    /// State of carriers 2 and 3 over `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub state: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AcausalReport {
    pub command: &'static str,
    pub seed: u64,
    pub tol: f64,
    pub bell: &'static str,
    pub branches: Vec<Branch>,
    pub pass: bool,
}

impl Report for AcausalReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["a", "probability", "fidelity"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.branches
            .iter()
            .map(|b| vec![b.a.to_string(), b.probability.to_string(), b.fidelity.to_string()])
            .collect()
    }

    fn passed(&self) -> bool {
        self.pass
    }
}

pub fn run(seed: u64, tol: f64, bell: BellState) -> CliResult<AcausalReport> {
    let mut branches = Vec::new();
    for a in 0..2 {
        let r = acausal_experiment_with(a, bell)?;
        branches.push(Branch {
            a,
            probability: r.outcome.probability,
            fidelity: r.fidelity,
            state: state_pairs(&r.outcome.state),
        });
    }
    let pass = branches
        .iter()
        .all(|b| b.fidelity >= 1.0 - tol && (b.probability - 0.25).abs() <= tol);
    Ok(AcausalReport { command: "acausal", seed, tol, bell: bell.name(), branches, pass })
}
