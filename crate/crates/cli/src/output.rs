use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use timeflow_core::linalg::{Complex64, PureState};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command's result: a JSON document, an equivalent flat table, and
/// whether the run counts as a verification success.
pub trait Report: Serialize {
    fn csv_header(&self) -> Vec<&'static str>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
    fn passed(&self) -> bool {
        true
    }
}

pub fn complex_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn state_pairs(s: &PureState) -> Vec<[f64; 2]> {
    complex_pairs(s.amplitudes())
}

fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::file(p, e))?),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_table(out: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    let fail = |e: csv::Error| CliError::Input(format!("writing CSV: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit<R: Report>(report: &R, format: Format, out: Option<&Path>) -> CliResult<()> {
    match format {
        Format::Json => {
            let mut w = sink(out)?;
            serde_json::to_writer_pretty(&mut w, report)
                .map_err(|e| CliError::Input(format!("writing JSON: {e}")))?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
        Format::Csv => write_table(out, &report.csv_header(), &report.csv_rows()),
    }
}
