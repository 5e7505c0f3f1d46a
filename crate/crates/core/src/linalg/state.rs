use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::{DEFAULT_TOL, PSD_TOL};
use crate::error::{Error, Result};

/// A state vector. Normalized unless it was built with
/// [`PureState::unnormalized`], in which case the squared norm carries a
/// post-selection probability.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let state = Self::unnormalized(amps)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    pub fn unnormalized(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch("empty state vector".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalize(amps: Vec<Complex64>) -> Result<Self> {
        Self::unnormalized(amps)?.normalized()
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            amps: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|z| z * s).collect(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            amps: self.amps.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Result<Self> {
        if m.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator applied to a {}-dimensional state",
                m.rows(),
                m.cols(),
                self.dim()
            )));
        }
        Ok(Self { amps: m.apply(&self.amps) })
    }

    /// `|self⟩⟨self|` as a plain matrix.
    pub fn outer(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in comparison");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `1 − |⟨x|y⟩| / (‖x‖‖y‖)`, zero when the rays coincide.
    pub fn phase_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "states of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok((1.0 - self.inner(other).norm() / denom).max(0.0))
    }
}

/// `‖x − e^{iφ}y‖_max` with `φ` the phase of `⟨y|x⟩`, i.e. the entrywise
/// distance after aligning the global phase of `y` to `x`.
pub fn global_phase_deviation(x: &PureState, y: &PureState) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    let overlap = y.inner(x);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(x.max_abs_diff(&y.scale(phase)))
}

/// True iff `|⟨x|y⟩| ≥ (1 − tol)·‖x‖·‖y‖`.
pub fn equal_up_to_global_phase(x: &PureState, y: &PureState, tol: f64) -> Result<bool> {
    Ok(x.phase_distance(y)? <= tol)
}

/// Hermitian operator on a finite Hilbert space.
///
/// [`DensityMatrix::new`] enforces the full physical constraints, while
/// [`DensityMatrix::subnormalized`] drops unit trace (post-selected branches)
/// and [`DensityMatrix::deviation`] keeps only Hermiticity (NMR deviation
/// operators).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::subnormalized(matrix)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { norm: tr });
        }
        Ok(rho)
    }

    pub fn subnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::deviation(matrix)?;
        let min = rho
            .matrix
            .eigenvalues_hermitian()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(rho)
    }

    pub fn deviation(matrix: ComplexMatrix) -> Result<Self> {
        matrix.require_square()?;
        let defect = matrix.hermiticity_defect();
        if defect > DEFAULT_TOL {
            return Err(Error::NotHermitian { deviation: defect });
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { matrix: psi.outer() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix.eigenvalues_hermitian()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        partial_trace(&self.matrix, dims, keep).map(Self::from_matrix_unchecked)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Reduces `m`, an operator on `⊗ dims`, to the subsystems listed in `keep`
/// (kept subsystems retain their original relative order).
///
/// Works on any square operator, not only positive ones, so intermediate
/// products such as `(P ⊗ 1)|Φ⟩⟨Φ|` can be reduced directly.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != n {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimensions {dims:?} do not multiply to {n}"
        )));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: dims.len(),
            });
        }
        kept[k] = true;
    }
    let kept_dim: usize = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();

    // split every full index into (kept part, traced part)
    let split: Vec<(usize, usize)> = (0..n)
        .map(|mut idx| {
            let mut digits = vec![0; dims.len()];
            for s in (0..dims.len()).rev() {
                digits[s] = idx % dims[s];
                idx /= dims[s];
            }
            let (mut a, mut b) = (0, 0);
            for (s, &dig) in digits.iter().enumerate() {
                if kept[s] {
                    a = a * dims[s] + dig;
                } else {
                    b = b * dims[s] + dig;
                }
            }
            (a, b)
        })
        .collect();

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for (i, &(ri, ti)) in split.iter().enumerate() {
        for (j, &(rj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ri, rj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Applies `u` to one subsystem of a vector over `⊗ dims` without forming
/// the full operator.
pub fn apply_local(state: &[Complex64], dims: &[usize], carrier: usize, u: &ComplexMatrix) -> Vec<Complex64> {
    let d = dims[carrier];
    assert_eq!(u.rows(), d, "local operator does not match subsystem dimension");
    assert_eq!(u.cols(), d, "local operator does not match subsystem dimension");
    let inner: usize = dims[carrier + 1..].iter().product();
    let outer: usize = dims[..carrier].iter().product();
    assert_eq!(outer * d * inner, state.len(), "state length does not match dims");
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    let mut column = vec![Complex64::new(0.0, 0.0); d];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            for (k, c) in column.iter_mut().enumerate() {
                *c = state[base + k * inner];
            }
            for r in 0..d {
                out[base + r * inner] = u.row(r).iter().zip(&column).map(|(a, b)| a * b).sum();
            }
        }
    }
    out
}

/// Left-multiplies `m` by `u` acting on one subsystem (each column is
/// treated as a vector).
pub fn left_apply_local(m: &ComplexMatrix, dims: &[usize], carrier: usize, u: &ComplexMatrix) -> ComplexMatrix {
    let t = m.transpose();
    let n = m.rows();
    let mut out_t = Vec::with_capacity(n * m.cols());
    for c in 0..m.cols() {
        out_t.extend(apply_local(t.row(c), dims, carrier, u));
    }
    ComplexMatrix::new(m.cols(), n, out_t)
        .expect("shape preserved")
        .transpose()
}

/// `U_k · m · U_k†` for `u` acting on subsystem `carrier`.
pub fn conjugate_local(m: &ComplexMatrix, dims: &[usize], carrier: usize, u: &ComplexMatrix) -> ComplexMatrix {
    let left = left_apply_local(m, dims, carrier, u);
    left_apply_local(&left.dagger(), dims, carrier, u).dagger()
}

/// `1 ⊗ … ⊗ u ⊗ … ⊗ 1` as a dense operator.
pub fn embed_local(dims: &[usize], carrier: usize, u: &ComplexMatrix) -> ComplexMatrix {
    dims.iter().enumerate().fold(ComplexMatrix::identity(1), |acc, (s, &d)| {
        if s == carrier {
            acc.kron(u)
        } else {
            acc.kron(&ComplexMatrix::identity(d))
        }
    })
}
