use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::pauli::spin_count;
use super::SpinSystem;
use crate::error::{Error, Result};
use crate::linalg::{conjugate_local, ComplexMatrix, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> ComplexMatrix {
        match self {
            Axis::X => ComplexMatrix::pauli_x(),
            Axis::Y => ComplexMatrix::pauli_y(),
            Axis::Z => ComplexMatrix::pauli_z(),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidArgument(format!("unknown axis '{other}'"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// `±1` for spin `k` (0-based, most significant first) in basis index `a`.
fn z_sign(a: usize, k: usize, n: usize) -> f64 {
    if (a >> (n - 1 - k)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Diagonal of `H = Σ πν_i Z_i + (π/2) Σ_{i<j} J_ij Z_i Z_j` (rad/s).
pub fn hamiltonian_diagonal(s: &SpinSystem) -> Vec<f64> {
    let n = s.n();
    (0..s.dim())
        .map(|a| {
            let mut e = 0.0;
            for i in 0..n {
                let zi = z_sign(a, i, n);
                e += PI * s.larmor()[i] * zi;
                for j in i + 1..n {
                    e += 0.5 * PI * s.coupling(i, j) * zi * z_sign(a, j, n);
                }
            }
            e
        })
        .collect()
}

pub fn build_hamiltonian(s: &SpinSystem) -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&hamiltonian_diagonal(s))
}

/// Coupling part `(π/2)·J_ab·Z_a Z_b` alone, as a diagonal.
pub fn coupling_diagonal(s: &SpinSystem, a: usize, b: usize) -> Result<Vec<f64>> {
    s.check_spin(a)?;
    s.check_spin(b)?;
    let n = s.n();
    let j = s.coupling(a, b);
    Ok((0..s.dim()).map(|x| 0.5 * PI * j * z_sign(x, a, n) * z_sign(x, b, n)).collect())
}

fn evolve_diagonal(rho: &ComplexMatrix, h: &[f64], t: f64) -> ComplexMatrix {
    let mut out = rho.clone();
    for a in 0..h.len() {
        for b in 0..h.len() {
            if out[(a, b)] != Complex64::new(0.0, 0.0) {
                out[(a, b)] *= Complex64::from_polar(1.0, -(h[a] - h[b]) * t);
            }
        }
    }
    out
}

/// `e^{−iHt}·ρ·e^{iHt}`.
pub fn evolve(rho: &DensityMatrix, h: &ComplexMatrix, t: f64) -> Result<DensityMatrix> {
    let n = h.require_square()?;
    if n != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{n}x{n} Hamiltonian for a {}-dimensional state",
            rho.dim()
        )));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let deviation = h.hermiticity_defect();
    if deviation > 1e-12 * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    if h.is_diagonal(0.0) {
        let diag: Vec<f64> = h.diagonal().iter().map(|z| z.re).collect();
        return Ok(DensityMatrix::from_matrix_unchecked(evolve_diagonal(rho.matrix(), &diag, t)));
    }
    let (values, vectors) = h.hermitian_eigen()?;
    let phases: Vec<Complex64> = values.iter().map(|&e| Complex64::from_polar(1.0, -e * t)).collect();
    let u = &(&vectors * &ComplexMatrix::from_diagonal(&phases)) * &vectors.dagger();
    Ok(DensityMatrix::from_matrix_unchecked(&(&u * rho.matrix()) * &u.dagger()))
}

/// `exp(−i·angle·σ/2)`.
pub fn rotation_matrix(axis: Axis, angle: f64) -> ComplexMatrix {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let id = ComplexMatrix::identity(2).scale_real(c);
    &id - &axis.pauli().scale(Complex64::new(0.0, s))
}

pub fn apply_rotation(rho: &DensityMatrix, spins: &[usize], axis: Axis, angle: f64) -> Result<DensityMatrix> {
    if !angle.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = spin_count(rho.dim())?;
    let dims = vec![2; n];
    let r = rotation_matrix(axis, angle);
    let mut m = rho.matrix().clone();
    for &k in spins {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, len: n });
        }
        m = conjugate_local(&m, &dims, k, &r);
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Ideal coupling gate `exp(−i·angle/2·Z_a Z_b)`, realized as evolution under
/// the pair's coupling term alone for `t = angle/(π·J_ab)`.
pub fn apply_coupling(s: &SpinSystem, rho: &DensityMatrix, a: usize, b: usize, angle: f64) -> Result<DensityMatrix> {
    if a == b {
        return Err(Error::InvalidSequence(format!("coupling of spin {} with itself", a + 1)));
    }
    if !angle.is_finite() {
        return Err(Error::NonFinite);
    }
    let diag = coupling_diagonal(s, a, b)?;
    let j = s.coupling(a, b);
    if j == 0.0 {
        return Err(Error::InvalidSequence(format!("J{}{} is zero", a + 1, b + 1)));
    }
    let t = angle / (PI * j);
    Ok(DensityMatrix::from_matrix_unchecked(evolve_diagonal(rho.matrix(), &diag, t)))
}

/// Ideal crusher: keeps only elements diagonal in every listed spin.
pub fn gradient_crush(rho: &DensityMatrix, spins: &[usize]) -> Result<DensityMatrix> {
    let n = spin_count(rho.dim())?;
    if spins.is_empty() {
        return Err(Error::InvalidSequence("gradient on an empty spin set".into()));
    }
    let mut mask = 0usize;
    for &k in spins {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, len: n });
        }
        mask |= 1 << (n - 1 - k);
    }
    let mut m = rho.matrix().clone();
    let dim = rho.dim();
    for a in 0..dim {
        for b in 0..dim {
            if (a ^ b) & mask != 0 {
                m[(a, b)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmr::{pseudopure_init, PauliProductState};

    fn dev(label: &str) -> DensityMatrix {
        pseudopure_init(&label.parse::<PauliProductState>().unwrap())
    }

    fn one(nu: f64) -> SpinSystem {
        SpinSystem::new(vec![nu], vec![vec![0.0]]).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let h = build_hamiltonian(&one(100.0));
        assert!(h.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[100.0 * PI, -100.0 * PI])) < 1e-12);
        let s = SpinSystem::from_upper_triangle(vec![0.0, 0.0], &[50.0]).unwrap();
        let expected: Vec<f64> = [1.0, -1.0, -1.0, 1.0].iter().map(|z| 0.5 * PI * 50.0 * z).collect();
        assert!(build_hamiltonian(&s).max_abs_diff(&ComplexMatrix::from_real_diagonal(&expected)) < 1e-12);
    }

    #[test]
    fn larmor_precession_quarter_period() {
        let h = build_hamiltonian(&one(100.0));
        let rho = evolve(&dev("X"), &h, 2.5e-3).unwrap();
        assert!(rho.matrix().max_abs_diff(&ComplexMatrix::pauli_y()) < 1e-12);
        let same = evolve(&dev("X"), &h, 0.0).unwrap();
        assert_eq!(same, dev("X"));
    }

    #[test]
    fn dense_path_agrees_with_diagonal_path() {
        // conjugating H by a fixed unitary moves it off the diagonal
        let h = build_hamiltonian(&SpinSystem::from_upper_triangle(vec![30.0, -70.0], &[12.0]).unwrap());
        let r = rotation_matrix(Axis::Y, 0.7).kron(&rotation_matrix(Axis::X, -1.1));
        let h_rot = &(&r * &h) * &r.dagger();
        let rho = dev("X0");
        let rho_rot = DensityMatrix::from_matrix_unchecked(&(&r * rho.matrix()) * &r.dagger());
        let a = evolve(&rho_rot, &h_rot, 0.013).unwrap();
        let b = evolve(&rho, &h, 0.013).unwrap();
        let b_rot = &(&r * b.matrix()) * &r.dagger();
        assert!(a.matrix().max_abs_diff(&b_rot) < 1e-10);
    }

    #[test]
    fn evolve_rejects_non_hermitian() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(evolve(&dev("Z"), &h, 1.0), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            evolve(&dev("Z"), &ComplexMatrix::identity(4), 1.0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn rotation_sign_conventions() {
        let x = apply_rotation(&dev("Z"), &[0], Axis::Y, PI / 2.0).unwrap();
        assert!(x.matrix().max_abs_diff(&ComplexMatrix::pauli_x()) < 1e-15);
        let z = apply_rotation(&dev("X"), &[0], Axis::Y, -PI / 2.0).unwrap();
        assert!(z.matrix().max_abs_diff(&ComplexMatrix::pauli_z()) < 1e-15);
        let full = apply_rotation(&dev("XY"), &[0, 1], Axis::X, 2.0 * PI).unwrap();
        assert!(full.matrix().max_abs_diff(dev("XY").matrix()) < 1e-15);
        assert!(matches!(apply_rotation(&dev("X"), &[1], Axis::X, 1.0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn coupling_acts_as_controlled_phase() {
        // X ⊗ |0⟩⟨0| under a π/2 ZZ phase becomes Y ⊗ |0⟩⟨0| (up to the
        // local Z rotation a CZ differs by); the |1⟩ branch goes to −Y.
        let s = SpinSystem::from_upper_triangle(vec![0.0, 0.0], &[50.0]).unwrap();
        let a = apply_coupling(&s, &dev("X0"), 0, 1, PI / 2.0).unwrap();
        assert!(a.matrix().max_abs_diff(dev("Y0").matrix()) < 1e-15);
        let b = apply_coupling(&s, &dev("X1"), 0, 1, PI / 2.0).unwrap();
        assert!(b.matrix().max_abs_diff(&dev("Y1").matrix().scale_real(-1.0)) < 1e-15);
        // same result from free evolution under the coupling alone for 1/(2J)
        let free = evolve(&dev("X0"), &build_hamiltonian(&s), 1.0 / 100.0).unwrap();
        assert!(free.matrix().max_abs_diff(a.matrix()) < 1e-12);

        let uncoupled = SpinSystem::from_upper_triangle(vec![0.0, 0.0], &[0.0]).unwrap();
        assert!(matches!(apply_coupling(&uncoupled, &dev("X0"), 0, 1, 1.0), Err(Error::InvalidSequence(_))));
    }

    #[test]
    fn crusher_examples() {
        assert_eq!(gradient_crush(&dev("X"), &[0]).unwrap().matrix().max_abs(), 0.0);
        assert_eq!(gradient_crush(&dev("Z"), &[0]).unwrap(), dev("Z"));
        let mixed = dev("XZ");
        assert_eq!(gradient_crush(&mixed, &[1]).unwrap(), mixed);
        assert!(gradient_crush(&mixed, &[]).is_err());
        assert!(gradient_crush(&mixed, &[2]).is_err());
    }
}
