use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliSymbol {
    I,
    X,
    Y,
    Z,
    /// `(1 + Z)/2`
    Zero,
    /// `(1 − Z)/2`
    One,
}

impl PauliSymbol {
    pub const LETTERS: [PauliSymbol; 4] = [PauliSymbol::I, PauliSymbol::X, PauliSymbol::Y, PauliSymbol::Z];

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'I' => PauliSymbol::I,
            'X' => PauliSymbol::X,
            'Y' => PauliSymbol::Y,
            'Z' => PauliSymbol::Z,
            '0' => PauliSymbol::Zero,
            '1' => PauliSymbol::One,
            _ => return None,
        })
    }

    pub fn as_char(self) -> char {
        match self {
            PauliSymbol::I => 'I',
            PauliSymbol::X => 'X',
            PauliSymbol::Y => 'Y',
            PauliSymbol::Z => 'Z',
            PauliSymbol::Zero => '0',
            PauliSymbol::One => '1',
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            PauliSymbol::I => ComplexMatrix::identity(2),
            PauliSymbol::X => ComplexMatrix::pauli_x(),
            PauliSymbol::Y => ComplexMatrix::pauli_y(),
            PauliSymbol::Z => ComplexMatrix::pauli_z(),
            PauliSymbol::Zero => ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
            PauliSymbol::One => ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
        }
    }

    pub fn is_letter(self) -> bool {
        !matches!(self, PauliSymbol::Zero | PauliSymbol::One)
    }
}

/// A product of per-spin factors written as a string such as `X00X`; spin 1
/// is the leftmost symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliProductState {
    symbols: Vec<PauliSymbol>,
}

impl PauliProductState {
    pub fn new(symbols: Vec<PauliSymbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli product".into()));
        }
        Ok(Self { symbols })
    }

    pub fn symbols(&self) -> &[PauliSymbol] {
        &self.symbols
    }

    pub fn n(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_letters_only(&self) -> bool {
        self.symbols.iter().all(|s| s.is_letter())
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.symbols
            .iter()
            .fold(ComplexMatrix::identity(1), |acc, s| acc.kron(&s.matrix()))
    }
}

impl FromStr for PauliProductState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .enumerate()
            .map(|(position, symbol)| {
                PauliSymbol::from_char(symbol).ok_or(Error::InvalidSymbol { symbol, position })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols)
    }
}

impl fmt::Display for PauliProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbols.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

/// Deviation matrix of a product label: the Kronecker product of the
/// per-spin factors, so `X00X = ¼·X(1+Z)(1+Z)X`.
pub fn pseudopure_init(label: &PauliProductState) -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(label.matrix())
}

pub(crate) fn spin_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// `tr(ρ·P)` for a letters-only product `P`, without forming `P`.
fn pauli_trace(m: &ComplexMatrix, letters: &[PauliSymbol]) -> Complex64 {
    let n = letters.len();
    let mut flip = 0usize;
    for (k, s) in letters.iter().enumerate() {
        if matches!(s, PauliSymbol::X | PauliSymbol::Y) {
            flip |= 1 << (n - 1 - k);
        }
    }
    let i = Complex64::new(0.0, 1.0);
    (0..1usize << n)
        .map(|a| {
            let mut phase = Complex64::new(1.0, 0.0);
            for (k, s) in letters.iter().enumerate() {
                let bit = (a >> (n - 1 - k)) & 1;
                match (s, bit) {
                    (PauliSymbol::Y, 0) => phase *= i,
                    (PauliSymbol::Y, _) => phase *= -i,
                    (PauliSymbol::Z, 1) => phase = -phase,
                    _ => {}
                }
            }
            m[(a, a ^ flip)] * phase
        })
        .sum()
}

/// Expansion over `{I,X,Y,Z}^n` with coefficients `tr(ρ·P)/2^n`; terms with
/// `|c| ≤ tol` are dropped. Terms come in lexicographic I < X < Y < Z order.
pub fn pauli_decompose(rho: &DensityMatrix, tol: f64) -> Result<Vec<(PauliProductState, f64)>> {
    let m = rho.matrix();
    let n = spin_count(m.rows())?;
    let scale = 1.0 / m.rows() as f64;
    let mut out = Vec::new();
    for code in 0..1usize << (2 * n) {
        let letters: Vec<PauliSymbol> = (0..n)
            .map(|k| PauliSymbol::LETTERS[(code >> (2 * (n - 1 - k))) & 3])
            .collect();
        let c = pauli_trace(m, &letters).re * scale;
        if c.abs() > tol {
            out.push((PauliProductState { symbols: letters }, c));
        }
    }
    Ok(out)
}

/// The block `⟨b|ρ|b⟩` where `|b⟩` fixes the computational states `bits` of
/// `spins`; the result acts on the remaining spins in order.
pub fn conditional_block(rho: &DensityMatrix, spins: &[usize], bits: &[u8]) -> Result<DensityMatrix> {
    let m = rho.matrix();
    let n = spin_count(m.rows())?;
    if spins.len() != bits.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} spins but {} bit values",
            spins.len(),
            bits.len()
        )));
    }
    for (i, &s) in spins.iter().enumerate() {
        if s >= n {
            return Err(Error::IndexOutOfRange { index: s, len: n });
        }
        if spins[..i].contains(&s) || bits[i] > 1 {
            return Err(Error::InvalidArgument(format!("bad fixed spin {s} = {}", bits[i])));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|k| !spins.contains(k)).collect();
    let mut base = 0usize;
    for (&s, &b) in spins.iter().zip(bits) {
        base |= (b as usize) << (n - 1 - s);
    }
    let full = |r: usize| {
        rest.iter().enumerate().fold(base, |acc, (pos, &k)| {
            acc | (((r >> (rest.len() - 1 - pos)) & 1) << (n - 1 - k))
        })
    };
    let dim = 1usize << rest.len();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(r, c)] = m[(full(r), full(c))];
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}
