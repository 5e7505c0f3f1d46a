//! `timeflow teleport`: both evaluations of one teleportation-like circuit.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use timeflow_core::circuits::{
    forward_oracle, nonmax_loss, timeflow_eval, timeflow_trace, transmission_bounds, TeleportCircuit,
};
use timeflow_core::linalg::global_phase_deviation;
use timeflow_core::random::random_state;
use timeflow_core::timeflow::{is_maximally_entangled, Encoding};

use crate::circuit_file::{self, ParsedCircuit};
use crate::error::{CliError, CliResult};
use crate::output::{state_pairs, Report};

#[derive(Clone, Debug, Serialize)]
pub struct OutcomeEntry {
    pub index: usize,
    pub probability: f64,
    pub state: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub label: &'static str,
    pub vector: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TimeflowSection {
    pub encoding: String,
    pub probability: f64,
    pub state: Vec<[f64; 2]>,
    pub trace: Vec<TraceEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonmaxSection {
    pub singular_values: Vec<f64>,
    pub backward_vector: Vec<[f64; 2]>,
    pub transmitted: f64,
    pub min_transmission: f64,
    pub max_transmission: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TeleportReport {
    pub command: &'static str,
    pub seed: u64,
    pub tol: f64,
    pub source: String,
    pub d: usize,
    pub phi_maximally_entangled: bool,
    pub outcomes: Vec<OutcomeEntry>,
    pub timeflow: Option<TimeflowSection>,
    pub max_deviation: Option<f64>,
    pub agreement: Option<bool>,
    pub nonmax: Option<NonmaxSection>,
}

impl Report for TeleportReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["evaluation", "outcome", "probability", "component", "re", "im"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        let mut push = |evaluation: &str, outcome: usize, p: f64, state: &[[f64; 2]]| {
            for (k, [re, im]) in state.iter().enumerate() {
                rows.push(vec![
                    evaluation.to_string(),
                    outcome.to_string(),
                    p.to_string(),
                    k.to_string(),
                    re.to_string(),
                    im.to_string(),
                ]);
            }
        };
        for o in &self.outcomes {
            push("oracle", o.index, o.probability, &o.state);
        }
        if let Some(t) = &self.timeflow {
            push("timeflow", 0, t.probability, &t.state);
        }
        rows
    }

    fn passed(&self) -> bool {
        self.agreement.unwrap_or(true)
    }
}

pub enum Source<'a> {
    File(&'a Path),
    Random { d: usize },
}

fn random_circuit(seed: u64, d: usize) -> CliResult<ParsedCircuit> {
    if d < 2 {
        return Err(CliError::Input("--dim must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = TeleportCircuit::random(d, &mut rng);
    let psi = random_state(d, &mut rng);
    Ok(ParsedCircuit {
        d,
        u: c.u().clone(),
        v: c.v().clone(),
        w: c.w().clone(),
        phi: c.phi().clone(),
        omega: c.omega().clone(),
        psi,
    })
}

pub fn run(seed: u64, tol: f64, source: Source, encoding: &str) -> CliResult<TeleportReport> {
    let (label, parsed) = match source {
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
            (path.display().to_string(), circuit_file::parse(&text).map_err(|e| CliError::file(path, e))?)
        }
        Source::Random { d } => (format!("random(d={d})"), random_circuit(seed, d)?),
    };
    let d = parsed.d;
    let e = Encoding::by_name(encoding, d)
        .ok_or_else(|| CliError::Input(format!("encoding '{encoding}' is not available for d = {d}")))?;
    let phi_max = is_maximally_entangled(&parsed.phi, timeflow_core::linalg::DEFAULT_TOL);
    let circuit = TeleportCircuit::with_any_phi(parsed.u, parsed.v, parsed.w, parsed.phi.clone(), parsed.omega)?;
    let psi = parsed.psi;

    let oracle = forward_oracle(&circuit, &psi)?;
    let outcomes = oracle
        .iter()
        .map(|(&index, o)| OutcomeEntry { index, probability: o.probability, state: state_pairs(&o.state) })
        .collect();

    let mut report = TeleportReport {
        command: "teleport",
        seed,
        tol,
        source: label,
        d,
        phi_maximally_entangled: phi_max,
        outcomes,
        timeflow: None,
        max_deviation: None,
        agreement: None,
        nonmax: None,
    };

    if phi_max {
        let tf = timeflow_eval(&circuit, &psi, &e)?;
        let trace = timeflow_trace(&circuit, &psi, &e)?
            .into_iter()
            .map(|s| TraceEntry { label: s.label, vector: state_pairs(&s.vector) })
            .collect();
        let reference = &oracle[&0];
        let dev = global_phase_deviation(&tf.state, &reference.state)?
            .max((tf.probability - reference.probability).abs());
        report.agreement = Some(dev <= tol);
        report.max_deviation = Some(dev);
        report.timeflow = Some(TimeflowSection {
            encoding: e.name().to_string(),
            probability: tf.probability,
            state: state_pairs(&tf.state),
            trace,
        });
    } else {
        let n = nonmax_loss(&parsed.phi, &psi)?;
        let (lo, hi) = transmission_bounds(&parsed.phi);
        report.nonmax = Some(NonmaxSection {
            singular_values: n.singular_values,
            backward_vector: state_pairs(&n.raw),
            transmitted: n.transmitted,
            min_transmission: lo,
            max_transmission: hi,
        });
    }
    Ok(report)
}
