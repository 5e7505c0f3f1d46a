use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Spin-1/2 nuclei with rotating-frame offsets `larmor` (Hz) and scalar
/// couplings `j` (Hz, symmetric, zero diagonal).
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSystem {
    larmor: Vec<f64>,
    j: Vec<Vec<f64>>,
}

impl SpinSystem {
    pub fn new(larmor: Vec<f64>, j: Vec<Vec<f64>>) -> Result<Self> {
        let n = larmor.len();
        if n == 0 {
            return Err(Error::InvalidSpinSystem("at least one spin is required".into()));
        }
        if larmor.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpinSystem("non-finite Larmor offset".into()));
        }
        if j.len() != n || j.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidSpinSystem(format!("coupling matrix must be {n}x{n}")));
        }
        #[allow(clippy::needless_range_loop)]
        for a in 0..n {
            if j[a][a] != 0.0 {
                return Err(Error::InvalidSpinSystem(format!("J{0}{0} must be zero", a + 1)));
            }
            for b in 0..n {
                if !j[a][b].is_finite() {
                    return Err(Error::InvalidSpinSystem("non-finite coupling".into()));
                }
                if j[a][b] != j[b][a] {
                    return Err(Error::InvalidSpinSystem(format!(
                        "J{}{} != J{}{}",
                        a + 1,
                        b + 1,
                        b + 1,
                        a + 1
                    )));
                }
            }
        }
        Ok(Self { larmor, j })
    }

    /// Couplings given row by row above the diagonal: `J12, J13, …, J23, …`.
    pub fn from_upper_triangle(larmor: Vec<f64>, upper: &[f64]) -> Result<Self> {
        let n = larmor.len();
        let expected = n * n.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::InvalidSpinSystem(format!(
                "{n} spins need {expected} couplings, got {}",
                upper.len()
            )));
        }
        let mut j = vec![vec![0.0; n]; n];
        let mut it = upper.iter();
        #[allow(clippy::needless_range_loop)]
        for a in 0..n {
            for b in a + 1..n {
                let v = *it.next().expect("length checked");
                j[a][b] = v;
                j[b][a] = v;
            }
        }
        Self::new(larmor, j)
    }

    pub fn n(&self) -> usize {
        self.larmor.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n()
    }

    pub fn larmor(&self) -> &[f64] {
        &self.larmor
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        self.j[a][b]
    }

    pub fn couplings(&self) -> &[Vec<f64>] {
        &self.j
    }

    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n();
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| self.j[a][b]).collect()
    }

    pub(crate) fn check_spin(&self, k: usize) -> Result<()> {
        if k >= self.n() {
            return Err(Error::IndexOutOfRange { index: k, len: self.n() });
        }
        Ok(())
    }
}

fn parse_list(value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("'{t}' is not a number"),
            })
        })
        .collect()
}

/// Text form:
///
/// ```text
/// # comment
/// n = 2
/// larmor = 100, -250
/// j = 50
/// ```
impl FromStr for SpinSystem {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut n = None;
        let mut larmor = None;
        let mut j = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: "expected 'key = value'".into(),
            })?;
            let key = key.trim().to_ascii_lowercase();
            let slot = match key.as_str() {
                "n" => {
                    let v = value.trim().parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        message: format!("spin count '{}' is not a positive integer", value.trim()),
                    })?;
                    if n.replace(v).is_some() {
                        return Err(Error::Parse { line, message: "duplicate key 'n'".into() });
                    }
                    continue;
                }
                "larmor" => &mut larmor,
                "j" => &mut j,
                other => {
                    return Err(Error::Parse { line, message: format!("unknown key '{other}'") })
                }
            };
            if slot.replace((line, parse_list(value, line)?)).is_some() {
                return Err(Error::Parse { line, message: format!("duplicate key '{key}'") });
            }
        }
        let missing = |k: &str| Error::Parse { line: 0, message: format!("missing key '{k}'") };
        let (larmor_line, larmor) = larmor.ok_or_else(|| missing("larmor"))?;
        let n = n.unwrap_or(larmor.len());
        if larmor.len() != n {
            return Err(Error::Parse {
                line: larmor_line,
                message: format!("n = {n} but {} Larmor offsets given", larmor.len()),
            });
        }
        let (j_line, upper) = j.unwrap_or((0, Vec::new()));
        SpinSystem::from_upper_triangle(larmor, &upper).map_err(|e| Error::Parse {
            line: j_line,
            message: e.to_string(),
        })
    }
}

impl fmt::Display for SpinSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        writeln!(f, "n = {}", self.n())?;
        writeln!(f, "larmor = {}", join(&self.larmor))?;
        writeln!(f, "j = {}", join(&self.upper_triangle()))
    }
}
