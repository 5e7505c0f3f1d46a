//! `timeflow nmr`: run a pulse sequence and report the final deviation
//! state, optionally writing the FID and spectrum.

use std::path::Path;

use serde::Serialize;

use timeflow_core::nmr::{
    fid, pauli_decompose, run_sequence, spectrum, zero_order_phase, Acquisition, PauliProductState,
    PulseSequence, SpinSystem,
};

use crate::error::{CliError, CliResult};
use crate::output::{write_table, Report};

#[derive(Clone, Debug, Serialize)]
pub struct Term {
    pub term: String,
    pub coefficient: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AcquisitionSummary {
    pub spin: usize,
    pub duration: f64,
    pub points: usize,
    pub line_broadening: f64,
    pub phase: f64,
    pub peak_frequency: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NmrReport {
    pub command: &'static str,
    pub seed: u64,
    pub tol: f64,
    pub spins: usize,
    pub init: String,
    pub events: usize,
    pub terms: Vec<Term>,
    pub acquisition: Option<AcquisitionSummary>,
}

impl Report for NmrReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["term", "coefficient"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.terms.iter().map(|t| vec![t.term.clone(), t.coefficient.to_string()]).collect()
    }
}

pub struct NmrArgs<'a> {
    pub spins: &'a Path,
    pub sequence: &'a Path,
    pub init: Option<&'a str>,
    pub spectrum_out: Option<&'a Path>,
    pub fid_out: Option<&'a Path>,
    /// `None`: no phasing; `Some(None)`: phase on the largest peak.
    pub phase: Option<Option<f64>>,
}

fn read<T>(path: &Path) -> CliResult<T>
where
    T: std::str::FromStr<Err = timeflow_core::Error>,
{
    let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
    text.parse().map_err(|e| CliError::file(path, e))
}

pub fn run(seed: u64, tol: f64, args: NmrArgs) -> CliResult<NmrReport> {
    let system: SpinSystem = read(args.spins)?;
    let seq: PulseSequence = read(args.sequence)?;
    let init: PauliProductState = match (args.init, &seq.init) {
        (Some(label), _) => label.parse()?,
        (None, Some(label)) => label.clone(),
        (None, None) => {
            return Err(CliError::Input("no initial state: add an 'init' line or pass --init".into()))
        }
    };
    if init.n() != system.n() {
        return Err(CliError::Input(format!(
            "initial state {init} has {} spins but {} describes {}",
            init.n(),
            args.spins.display(),
            system.n()
        )));
    }
    seq.validate(system.n()).map_err(|e| CliError::file(args.sequence, e))?;
    let rho = run_sequence(&system, &init, &seq)?;
    let terms = pauli_decompose(&rho, tol)?
        .into_iter()
        .map(|(p, c)| Term { term: p.to_string(), coefficient: c })
        .collect();

    let acquisition = match seq.acquisition {
        Some(acq) => Some(acquire(&system, &rho, &acq, &args)?),
        None => {
            if args.spectrum_out.is_some() || args.fid_out.is_some() {
                return Err(CliError::Input("spectrum output requested but the sequence has no 'acquire' line".into()));
            }
            None
        }
    };

    Ok(NmrReport {
        command: "nmr",
        seed,
        tol,
        spins: system.n(),
        init: init.to_string(),
        events: seq.events.len(),
        terms,
        acquisition,
    })
}

fn acquire(
    system: &SpinSystem,
    rho: &timeflow_core::linalg::DensityMatrix,
    acq: &Acquisition,
    args: &NmrArgs,
) -> CliResult<AcquisitionSummary> {
    let signal = fid(system, rho, acq.spin, acq.duration, acq.points)?;
    let raw = spectrum(&signal, acq.line_broadening);
    let phase = match args.phase {
        None => 0.0,
        Some(Some(p)) => p,
        Some(None) => zero_order_phase(&raw),
    };
    let sp = raw.phased(phase);
    if let Some(path) = args.fid_out {
        let rows: Vec<Vec<String>> = signal
            .times()
            .iter()
            .zip(&signal.samples)
            .map(|(t, z)| vec![t.to_string(), z.re.to_string(), z.im.to_string()])
            .collect();
        write_table(Some(path), &["time_s", "real", "imaginary"], &rows)?;
    }
    if let Some(path) = args.spectrum_out {
        let rows: Vec<Vec<String>> = sp
            .frequencies
            .iter()
            .zip(&sp.intensities)
            .map(|(f, z)| vec![f.to_string(), z.re.to_string(), z.im.to_string()])
            .collect();
        write_table(Some(path), &["frequency_hz", "real", "imaginary"], &rows)?;
    }
    Ok(AcquisitionSummary {
        spin: acq.spin + 1,
        duration: acq.duration,
        points: acq.points,
        line_broadening: acq.line_broadening,
        phase,
        peak_frequency: sp.peak_frequency(),
    })
}
