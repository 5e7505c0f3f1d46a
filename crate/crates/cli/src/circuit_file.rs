//! JSON description of a teleportation-like circuit.
//!
//! ```json
//! {
//!   "d": 2,
//!   "U": "H",
//!   "V": "RX(pi/3)",
//!   "W": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
//!   "phi": "PHI+",
//!   "omega": "PSI-",
//!   "psi": [[0.6, 0], [0, 0.8]]
//! }
//! ```
//!
//! Gates are names or matrices given as row-major `[re, im]` pairs (either
//! nested by row or flat). States are names or amplitude lists. `U`, `V`,
//! `W` default to `I`; `phi` and `omega` default to `MAX`.

use serde::Deserialize;

use timeflow_core::linalg::{Complex64, ComplexMatrix, PureState};
use timeflow_core::nmr::{parse_angle, rotation_matrix, Axis};
use timeflow_core::timeflow::{BellState, EntangledState};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GateSpec {
    Named(String),
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Amplitudes(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub d: usize,
    #[serde(rename = "U", alias = "u", default)]
    pub u: Option<GateSpec>,
    #[serde(rename = "V", alias = "v", default)]
    pub v: Option<GateSpec>,
    #[serde(rename = "W", alias = "w", default)]
    pub w: Option<GateSpec>,
    #[serde(default)]
    pub phi: Option<StateSpec>,
    #[serde(default)]
    pub omega: Option<StateSpec>,
    pub psi: StateSpec,
}

/// Everything needed to evaluate the circuit, before the entanglement
/// checks that decide which evaluations apply.
#[derive(Clone, Debug)]
pub struct ParsedCircuit {
    pub d: usize,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub w: ComplexMatrix,
    pub phi: EntangledState,
    pub omega: EntangledState,
    pub psi: PureState,
}

fn field_err(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("field '{field}': {message}"))
}

fn pairs(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

fn qubit_only(field: &str, name: &str, d: usize) -> CliResult<()> {
    if d != 2 {
        return Err(field_err(field, format!("gate '{name}' is only defined for d = 2")));
    }
    Ok(())
}

/// `I, X, Y, Z, H, S, RX(θ), RY(θ), RZ(θ)`; angles accept `pi` forms.
pub fn named_gate(field: &str, name: &str, d: usize) -> CliResult<ComplexMatrix> {
    let upper = name.trim().to_ascii_uppercase();
    if upper == "I" {
        return Ok(ComplexMatrix::identity(d));
    }
    qubit_only(field, name, d)?;
    let fixed = match upper.as_str() {
        "X" => Some(ComplexMatrix::pauli_x()),
        "Y" => Some(ComplexMatrix::pauli_y()),
        "Z" => Some(ComplexMatrix::pauli_z()),
        "H" => Some(ComplexMatrix::hadamard()),
        "S" => Some(ComplexMatrix::from_diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)])),
        _ => None,
    };
    if let Some(m) = fixed {
        return Ok(m);
    }
    let rotation = |prefix: &str, axis: Axis| -> Option<CliResult<ComplexMatrix>> {
        let inner = upper.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
        Some(
            parse_angle(inner)
                .map(|a| rotation_matrix(axis, a))
                .ok_or_else(|| field_err(field, format!("bad angle '{inner}'"))),
        )
    };
    rotation("RX", Axis::X)
        .or_else(|| rotation("RY", Axis::Y))
        .or_else(|| rotation("RZ", Axis::Z))
        .unwrap_or_else(|| Err(field_err(field, format!("unknown gate '{name}'"))))
}

fn gate(field: &str, spec: Option<&GateSpec>, d: usize) -> CliResult<ComplexMatrix> {
    let m = match spec {
        None => return Ok(ComplexMatrix::identity(d)),
        Some(GateSpec::Named(name)) => return named_gate(field, name, d),
        Some(GateSpec::Flat(v)) => {
            if v.len() != d * d {
                return Err(field_err(field, format!("expected {} entries, got {}", d * d, v.len())));
            }
            ComplexMatrix::new(d, d, pairs(v))
        }
        Some(GateSpec::Rows(rows)) => {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(field_err(field, format!("expected a {d}x{d} matrix")));
            }
            ComplexMatrix::from_rows(&rows.iter().map(|r| pairs(r)).collect::<Vec<_>>())
        }
    };
    m.map_err(|e| field_err(field, e))
}

/// `PHI+`, `PHI-`, `PSI+`, `PSI-` (d = 2), `MAX` (`Σ|ii⟩/√d`) and
/// `THETA(θ)` (`cos θ|00⟩ + sin θ|11⟩`, d = 2).
pub fn named_pair(field: &str, name: &str, d: usize) -> CliResult<EntangledState> {
    let upper = name.trim().to_ascii_uppercase();
    if upper == "MAX" {
        return Ok(EntangledState::maximally_entangled(d));
    }
    if let Some(inner) = upper.strip_prefix("THETA(").and_then(|s| s.strip_suffix(')')) {
        qubit_only(field, name, d)?;
        let theta = parse_angle(inner).ok_or_else(|| field_err(field, format!("bad angle '{inner}'")))?;
        return Ok(EntangledState::partially_entangled(theta));
    }
    let bell: BellState = name.parse().map_err(|e| field_err(field, e))?;
    qubit_only(field, name, d)?;
    Ok(bell.state())
}

fn pair(field: &str, spec: Option<&StateSpec>, d: usize) -> CliResult<EntangledState> {
    match spec {
        None => Ok(EntangledState::maximally_entangled(d)),
        Some(StateSpec::Named(name)) => named_pair(field, name, d),
        Some(StateSpec::Amplitudes(v)) => {
            if v.len() != d * d {
                return Err(field_err(field, format!("expected {} amplitudes, got {}", d * d, v.len())));
            }
            let s = PureState::new(pairs(v)).map_err(|e| field_err(field, e))?;
            EntangledState::new(s).map_err(|e| field_err(field, e))
        }
    }
}

fn input_state(spec: &StateSpec, d: usize) -> CliResult<PureState> {
    match spec {
        StateSpec::Named(name) => {
            let k: usize = name
                .trim()
                .parse()
                .map_err(|_| field_err("psi", format!("'{name}' is neither a basis index nor an amplitude list")))?;
            PureState::basis(d, k).map_err(|e| field_err("psi", e))
        }
        StateSpec::Amplitudes(v) => {
            if v.len() != d {
                return Err(field_err("psi", format!("expected {d} amplitudes, got {}", v.len())));
            }
            PureState::new(pairs(v)).map_err(|e| field_err("psi", e))
        }
    }
}

/// Untagged enums lose the field name; find which field fails on its own.
fn describe(value: &serde_json::Value, e: serde_json::Error) -> CliError {
    let Some(obj) = value.as_object() else {
        return CliError::Input(format!("circuit file: {e}"));
    };
    for (key, v) in obj {
        let bad = match key.as_str() {
            "d" => serde_json::from_value::<usize>(v.clone()).is_err(),
            "U" | "V" | "W" | "u" | "v" | "w" => serde_json::from_value::<GateSpec>(v.clone()).is_err(),
            "phi" | "omega" | "psi" => serde_json::from_value::<StateSpec>(v.clone()).is_err(),
            _ => false,
        };
        if bad {
            return field_err(key, format!("unexpected value {v}"));
        }
    }
    CliError::Input(format!("circuit file: {e}"))
}

pub fn parse(text: &str) -> CliResult<ParsedCircuit> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("circuit file: {e}")))?;
    let f: CircuitFile = serde_json::from_value(value.clone()).map_err(|e| describe(&value, e))?;
    let d = f.d;
    if d < 2 {
        return Err(field_err("d", "carrier dimension must be at least 2"));
    }
    Ok(ParsedCircuit {
        d,
        u: gate("U", f.u.as_ref(), d)?,
        v: gate("V", f.v.as_ref(), d)?,
        w: gate("W", f.w.as_ref(), d)?,
        phi: pair("phi", f.phi.as_ref(), d)?,
        omega: pair("omega", f.omega.as_ref(), d)?,
        psi: input_state(&f.psi, d)?,
    })
}
