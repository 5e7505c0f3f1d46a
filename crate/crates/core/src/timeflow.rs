//! State↔matrix correspondence and time reversal of states and gates.
//!
//! A bipartite state `|Φ⟩ = Σ Φ_kl |kl⟩` over two `d`-level carriers is read
//! as the `d × d` matrix `Q_Φ` with `(Q_Φ)_ij = ⟨ji|Φ⟩`. Post-selecting a pair
//! of carriers on `|Φ⟩` sends `Q_Φ|ψ*⟩` backwards along the partner carrier,
//! and `M_Φ = √d·Q_Φ` is unitary exactly when `|Φ⟩` is maximally entangled.
//!
//! Time reversal is the anti-unitary `M_T·K` where `K` conjugates in the
//! computational basis and `M_T` depends on the physical encoding: `α·σ_y`
//! for a spin-1/2 (spin flips), the identity for photon number (number is
//! invariant).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    is_unitary, unitarity_defect, ComplexMatrix, DensityMatrix, PureState, DEFAULT_TOL,
};

/// Sign `γ` in `M_T·M_T* = γ·1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gamma {
    Plus,
    Minus,
}

impl Gamma {
    pub fn value(self) -> f64 {
        match self {
            Gamma::Plus => 1.0,
            Gamma::Minus => -1.0,
        }
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Plus => write!(f, "+1"),
            Gamma::Minus => write!(f, "-1"),
        }
    }
}

/// Physical carrier choice fixing the unitary part `M_T` of time reversal.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoding {
    name: String,
    m_t: ComplexMatrix,
    gamma: Gamma,
}

impl Encoding {
    pub const SPIN_HALF: &'static str = "spin-1/2";
    pub const PHOTON_NUMBER: &'static str = "photon-number";

    /// Any unitary `m_t` with `m_t·m_t* = ±1` is a valid time-reversal matrix.
    pub fn new(name: impl Into<String>, m_t: ComplexMatrix) -> Result<Self> {
        let deviation = unitarity_defect(&m_t)?;
        if deviation > DEFAULT_TOL {
            return Err(Error::InvalidTimeReversal(format!(
                "M_T is not unitary (deviation {deviation:e})"
            )));
        }
        let gamma = gamma_of(&m_t)?;
        Ok(Self {
            name: name.into(),
            m_t,
            gamma,
        })
    }

    /// Spin-1/2 encoding with `M_T = σ_y`.
    pub fn spin_half() -> Self {
        Self::spin_half_with_phase(Complex64::new(1.0, 0.0)).expect("unit phase")
    }

    /// Spin-1/2 encoding with `M_T = α·σ_y`, `|α| = 1`.
    pub fn spin_half_with_phase(alpha: Complex64) -> Result<Self> {
        if (alpha.norm() - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidTimeReversal(format!(
                "phase factor must have unit modulus, got |α| = {}",
                alpha.norm()
            )));
        }
        Self::new(Self::SPIN_HALF, ComplexMatrix::pauli_y().scale(alpha))
    }

    /// Photon-number encoding, `M_T = 1`, in any dimension.
    pub fn photon_number(d: usize) -> Self {
        Self {
            name: Self::PHOTON_NUMBER.to_string(),
            m_t: ComplexMatrix::identity(d),
            gamma: Gamma::Plus,
        }
    }

    /// The two qubit encodings shipped by default.
    pub fn registry() -> Vec<Encoding> {
        vec![Self::spin_half(), Self::photon_number(2)]
    }

    pub fn by_name(name: &str, d: usize) -> Option<Self> {
        match name {
            Self::SPIN_HALF | "spin" if d == 2 => Some(Self::spin_half()),
            Self::PHOTON_NUMBER | "photon" => Some(Self::photon_number(d)),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn m_t(&self) -> &ComplexMatrix {
        &self.m_t
    }

    pub fn d(&self) -> usize {
        self.m_t.rows()
    }

    pub fn gamma(&self) -> Gamma {
        self.gamma
    }

    /// `|Φ_T⟩ ↔ M_T/√d`, the maximally entangled state that acts as a plain
    /// time mirror for this encoding.
    pub fn canonical_state(&self) -> EntangledState {
        let d = self.d() as f64;
        state_of_q(&self.m_t.scale_real(1.0 / d.sqrt())).expect("unitary M_T gives a normalized state")
    }
}

fn gamma_of(m_t: &ComplexMatrix) -> Result<Gamma> {
    let n = m_t.rows();
    let product = m_t * &m_t.conjugate();
    let g = product[(0, 0)];
    let scalar = ComplexMatrix::identity(n).scale(g);
    let off = product.max_abs_diff(&scalar);
    if off > DEFAULT_TOL || g.im.abs() > DEFAULT_TOL {
        return Err(Error::InvalidTimeReversal(format!(
            "M_T·M_T* is not a real multiple of the identity (deviation {off:e}, γ = {g})"
        )));
    }
    if (g.re - 1.0).abs() <= DEFAULT_TOL {
        Ok(Gamma::Plus)
    } else if (g.re + 1.0).abs() <= DEFAULT_TOL {
        Ok(Gamma::Minus)
    } else {
        Err(Error::InvalidTimeReversal(format!("γ = {} is not ±1", g.re)))
    }
}

/// Recomputes `γ` from `M_T·M_T* = γ·1`.
pub fn encoding_gamma(e: &Encoding) -> Result<Gamma> {
    gamma_of(&e.m_t)
}

/// The four qubit Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn amplitudes(self) -> [f64; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellState::PhiPlus => [s, 0.0, 0.0, s],
            BellState::PhiMinus => [s, 0.0, 0.0, -s],
            BellState::PsiPlus => [0.0, s, s, 0.0],
            BellState::PsiMinus => [0.0, s, -s, 0.0],
        }
    }

    /// `(z, x)` such that `CNOT·(H ⊗ 1)|z x⟩` is this Bell state.
    pub fn label_bits(self) -> (usize, usize) {
        match self {
            BellState::PhiPlus => (0, 0),
            BellState::PhiMinus => (1, 0),
            BellState::PsiPlus => (0, 1),
            BellState::PsiMinus => (1, 1),
        }
    }

    pub fn state(self) -> EntangledState {
        let amps = self.amplitudes().iter().map(|&a| Complex64::new(a, 0.0)).collect();
        EntangledState::new(PureState::new(amps).expect("normalized")).expect("two qubits")
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "PHI+",
            BellState::PhiMinus => "PHI-",
            BellState::PsiPlus => "PSI+",
            BellState::PsiMinus => "PSI-",
        }
    }
}

impl FromStr for BellState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('\u{2212}', "-");
        match norm.as_str() {
            "PHI+" => Ok(BellState::PhiPlus),
            "PHI-" => Ok(BellState::PhiMinus),
            "PSI+" => Ok(BellState::PsiPlus),
            "PSI-" => Ok(BellState::PsiMinus),
            _ => Err(Error::InvalidArgument(format!("unknown Bell state '{s}'"))),
        }
    }
}

/// Normalized state of two `d`-level carriers.
#[derive(Clone, Debug, PartialEq)]
pub struct EntangledState {
    state: PureState,
    d: usize,
}

impl EntangledState {
    pub fn new(state: PureState) -> Result<Self> {
        let dim = state.dim();
        let d = (dim as f64).sqrt().round() as usize;
        if d * d != dim {
            return Err(Error::DimensionMismatch(format!(
                "a bipartite state over equal carriers needs a square dimension, got {dim}"
            )));
        }
        let norm = state.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { state, d })
    }

    /// `Σ_i |ii⟩/√d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            amps[i * d + i] = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        Self {
            state: PureState::new(amps).expect("normalized"),
            d,
        }
    }

    /// `cos θ|00⟩ + sin θ|11⟩`.
    pub fn partially_entangled(theta: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        let amps = vec![Complex64::new(theta.cos(), 0.0), z, z, Complex64::new(theta.sin(), 0.0)];
        Self {
            state: PureState::new(amps).expect("normalized"),
            d: 2,
        }
    }

    /// Applies `u` to one carrier (0 or 1).
    pub fn apply_local(&self, carrier: usize, u: &ComplexMatrix) -> Result<Self> {
        if carrier > 1 {
            return Err(Error::IndexOutOfRange { index: carrier, len: 2 });
        }
        if u.rows() != self.d || u.cols() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a {}-level carrier",
                u.rows(),
                u.cols(),
                self.d
            )));
        }
        let amps = crate::linalg::apply_local(self.state.amplitudes(), &[self.d, self.d], carrier, u);
        Self::new(PureState::new(amps)?)
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    /// Reduced state of the second carrier (first carrier traced out).
    pub fn reduced_state(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.state)
            .partial_trace(&[self.d, self.d], &[1])
            .expect("square bipartite dims")
    }
}

/// `(Q_Φ)_ij = ⟨ji|Φ⟩`.
pub fn q_of_state(phi: &EntangledState) -> ComplexMatrix {
    let d = phi.d;
    let amps = phi.state.amplitudes();
    let mut q = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            q[(i, j)] = amps[j * d + i];
        }
    }
    q
}

/// Inverse of [`q_of_state`].
pub fn state_of_q(q: &ComplexMatrix) -> Result<EntangledState> {
    let d = q.require_square()?;
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            amps[j * d + i] = q[(i, j)];
        }
    }
    EntangledState::new(PureState::unnormalized(amps)?)
}

/// `M_Φ = √d·Q_Φ`.
pub fn m_of_state(phi: &EntangledState) -> ComplexMatrix {
    q_of_state(phi).scale_real((phi.d as f64).sqrt())
}

/// `‖d·ρ − 1‖_max` for `ρ` the reduced state after tracing out carrier 1.
///
/// Equals `‖M_Φ·M_Φ† − 1‖_max` because `M_Φ·M_Φ† = d·ρ`, so thresholding
/// either quantity classifies states identically.
pub fn maximal_entanglement_defect(phi: &EntangledState) -> f64 {
    let d = phi.d;
    phi.reduced_state()
        .matrix()
        .scale_real(d as f64)
        .max_abs_diff(&ComplexMatrix::identity(d))
}

/// True iff the reduced state of one carrier is `1/d` (within `tol` after
/// scaling by `d`).
pub fn is_maximally_entangled(phi: &EntangledState, tol: f64) -> bool {
    maximal_entanglement_defect(phi) <= tol
}

/// `|ψ⟩^tr = M_T|ψ*⟩`; the norm is preserved and unnormalized inputs stay
/// unnormalized.
pub fn time_reverse_state(psi: &PureState, e: &Encoding) -> Result<PureState> {
    if psi.dim() != e.d() {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional state under a {}-level encoding",
            psi.dim(),
            e.d()
        )));
    }
    psi.conjugate().apply(&e.m_t)
}

/// `U^tr = M_T·Ũ·M_T†`, the gate seen by a carrier running against the
/// observer's time.
pub fn time_reverse_gate(u: &ComplexMatrix, e: &Encoding) -> Result<ComplexMatrix> {
    if u.rows() != e.d() || u.cols() != e.d() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} gate under a {}-level encoding",
            u.rows(),
            u.cols(),
            e.d()
        )));
    }
    let deviation = unitarity_defect(u)?;
    if deviation > DEFAULT_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(&(&e.m_t * &u.transpose()) * &e.m_t.dagger())
}

/// Local unitary `χ_Ψ = M̃_Ψ·M_T*` with `(χ_Ψ ⊗ 1)|Φ_T⟩ = |Ψ⟩`.
pub fn chi_of_state(psi: &EntangledState, e: &Encoding) -> Result<ComplexMatrix> {
    if psi.d != e.d() {
        return Err(Error::DimensionMismatch(format!(
            "{}-level entangled state under a {}-level encoding",
            psi.d,
            e.d()
        )));
    }
    let deviation = maximal_entanglement_defect(psi);
    if deviation > DEFAULT_TOL {
        return Err(Error::NotMaximallyEntangled { deviation });
    }
    Ok(&m_of_state(psi).transpose() * &e.m_t.conjugate())
}

/// Both forms of the state sent backwards after post-selecting on `|Φ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct BackwardState {
    /// `tr₁((|ψ⟩⟨ψ| ⊗ 1)|Φ⟩⟨Φ|)`; trace equals the post-selection probability.
    pub rho_tr: DensityMatrix,
    /// `Q_Φ|ψ*⟩`, deliberately unnormalized.
    pub state: PureState,
}

pub fn backward_state(psi: &PureState, phi: &EntangledState) -> Result<BackwardState> {
    let d = phi.d;
    if psi.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional input against a {}-level entangled state",
            psi.dim(),
            d
        )));
    }
    let projector = psi.outer().kron(&ComplexMatrix::identity(d));
    let joint = &projector * &phi.state.outer();
    let reduced = crate::linalg::partial_trace(&joint, &[d, d], &[1])?;
    let state = psi.conjugate().apply(&q_of_state(phi))?;
    Ok(BackwardState {
        rho_tr: DensityMatrix::from_matrix_unchecked(reduced),
        state,
    })
}

/// `⟨ψ|S⃗|ψ⟩` with `S⃗ = σ⃗/2` for a qubit state.
pub fn spin_expectation(psi: &PureState) -> Result<[f64; 3]> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "spin expectation needs a qubit, got dimension {}",
            psi.dim()
        )));
    }
    let paulis = [ComplexMatrix::pauli_x(), ComplexMatrix::pauli_y(), ComplexMatrix::pauli_z()];
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&paulis) {
        *o = 0.5 * psi.inner(&psi.apply(p)?).re;
    }
    Ok(out)
}

/// Convenience wrapper: does `m` pass [`is_unitary`] at the default tolerance?
pub fn is_unitary_default(m: &ComplexMatrix) -> bool {
    is_unitary(m, DEFAULT_TOL).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, random_state};
    use rand::SeedableRng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rng(seed: u64) -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(seed)
    }

    // independent evaluation of ⟨ji|Φ⟩ by projecting onto basis kets
    fn q_by_overlap(phi: &EntangledState) -> ComplexMatrix {
        let d = phi.local_dim();
        let mut q = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let ket = PureState::basis(d, j).unwrap().kron(&PureState::basis(d, i).unwrap());
                q[(i, j)] = ket.inner(phi.state());
            }
        }
        q
    }

    #[test]
    fn q_of_bell_states() {
        let s = FRAC_1_SQRT_2;
        let q = q_of_state(&BellState::PhiPlus.state());
        assert!(q.max_abs_diff(&ComplexMatrix::identity(2).scale_real(s)) < 1e-15);
        let q = q_of_state(&BellState::PsiMinus.state());
        let expected = ComplexMatrix::from_real(2, 2, &[0.0, -s, s, 0.0]).unwrap();
        assert!(q.max_abs_diff(&expected) < 1e-15);
        assert!(q.max_abs_diff(&q_by_overlap(&BellState::PsiMinus.state())) < 1e-15);
        let prod = EntangledState::new(PureState::basis(4, 0).unwrap()).unwrap();
        assert_eq!(q_of_state(&prod), ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn q_matches_overlap_oracle_on_random_states() {
        let mut r = rng(1);
        for d in 2..5 {
            let phi = EntangledState::new(random_state(d * d, &mut r)).unwrap();
            assert_eq!(q_of_state(&phi), q_by_overlap(&phi));
        }
    }

    #[test]
    fn state_of_q_inverts() {
        let phi = state_of_q(&ComplexMatrix::identity(2).scale_real(FRAC_1_SQRT_2)).unwrap();
        assert!(phi.state().max_abs_diff(BellState::PhiPlus.state().state()) < 1e-15);
        let prod = state_of_q(&ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(prod.state(), &PureState::basis(4, 0).unwrap());
        let mut r = rng(2);
        for _ in 0..50 {
            let phi = EntangledState::new(random_state(4, &mut r)).unwrap();
            assert_eq!(state_of_q(&q_of_state(&phi)).unwrap(), phi);
        }
        assert!(matches!(state_of_q(&ComplexMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn m_of_named_states() {
        assert!(m_of_state(&BellState::PhiPlus.state()).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let m = m_of_state(&BellState::PsiMinus.state());
        let expected = ComplexMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert!(m.max_abs_diff(&expected) < 1e-15);
        assert!(m.max_abs_diff(&ComplexMatrix::pauli_y().scale(c(0.0, -1.0))) < 1e-15);
        assert!(is_unitary(&m, 1e-10).unwrap());

        let theta = PI / 6.0;
        let m = m_of_state(&EntangledState::partially_entangled(theta));
        let expected = ComplexMatrix::from_real_diagonal(&[2f64.sqrt() * theta.cos(), 2f64.sqrt() * theta.sin()]);
        assert!(m.max_abs_diff(&expected) < 1e-15);
        assert!(!is_unitary(&m, 1e-10).unwrap());
        let mm = &m * &m.dagger();
        let expected = ComplexMatrix::from_real_diagonal(&[2.0 * theta.cos().powi(2), 2.0 * theta.sin().powi(2)]);
        assert!(mm.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn maximal_entanglement_classification() {
        assert!(is_maximally_entangled(&BellState::PhiPlus.state(), 1e-10));
        let prod = EntangledState::new(PureState::basis(4, 0).unwrap()).unwrap();
        assert!(!is_maximally_entangled(&prod, 1e-10));
        let pi6 = EntangledState::partially_entangled(PI / 6.0);
        assert!(!is_maximally_entangled(&pi6, 1e-10));
        let t = PI / 6.0;
        let expected = ComplexMatrix::from_real_diagonal(&[t.cos().powi(2), t.sin().powi(2)]);
        assert!(pi6.reduced_state().matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn gamma_of_encodings() {
        assert_eq!(encoding_gamma(&Encoding::spin_half()).unwrap(), Gamma::Minus);
        assert_eq!(encoding_gamma(&Encoding::photon_number(2)).unwrap(), Gamma::Plus);
        let i_sigma_y = Encoding::spin_half_with_phase(Complex64::i()).unwrap();
        assert_eq!(encoding_gamma(&i_sigma_y).unwrap(), Gamma::Minus);
        // σ_x σ_x* = 1, a valid γ = +1 time reversal
        assert_eq!(Encoding::new("x", ComplexMatrix::pauli_x()).unwrap().gamma(), Gamma::Plus);
        // diagonal phases always give M M* = 1
        let phases = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), Complex64::from_polar(1.0, PI / 4.0)]);
        assert_eq!(Encoding::new("phases", phases).unwrap().gamma(), Gamma::Plus);
        // unitary, but M·M* is not a multiple of the identity
        let s = FRAC_1_SQRT_2;
        let skew = ComplexMatrix::new(2, 2, vec![c(s, 0.0), c(0.0, s), c(s, 0.0), c(0.0, -s)]).unwrap();
        assert!(is_unitary(&skew, 1e-12).unwrap());
        assert!(matches!(Encoding::new("skew", skew), Err(Error::InvalidTimeReversal(_))));
        assert!(matches!(
            Encoding::new("scaled", ComplexMatrix::identity(2).scale_real(2.0)),
            Err(Error::InvalidTimeReversal(_))
        ));
        assert!(Encoding::spin_half_with_phase(c(2.0, 0.0)).is_err());
    }

    #[test]
    fn time_reversed_states() {
        let zero = PureState::basis(2, 0).unwrap();
        let tr = time_reverse_state(&zero, &Encoding::spin_half()).unwrap();
        assert!(tr.max_abs_diff(&PureState::basis(2, 1).unwrap().scale(Complex64::i())) < 1e-15);
        let tr = time_reverse_state(&zero, &Encoding::photon_number(2)).unwrap();
        assert_eq!(tr, zero);
        assert!(matches!(
            time_reverse_state(&PureState::basis(3, 0).unwrap(), &Encoding::spin_half()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn spin_flips_under_reversal() {
        let mut r = rng(3);
        for k in 0..50 {
            let alpha = Complex64::from_polar(1.0, 0.37 * k as f64);
            let e = Encoding::spin_half_with_phase(alpha).unwrap();
            let psi = random_state(2, &mut r);
            let before = spin_expectation(&psi).unwrap();
            let after = spin_expectation(&time_reverse_state(&psi, &e).unwrap()).unwrap();
            for a in 0..3 {
                assert!((after[a] + before[a]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn time_reversed_gates() {
        let sx = ComplexMatrix::pauli_x();
        let tr = time_reverse_gate(&sx, &Encoding::spin_half()).unwrap();
        assert!(tr.max_abs_diff(&sx.scale_real(-1.0)) < 1e-15);
        let h = ComplexMatrix::hadamard();
        assert_eq!(time_reverse_gate(&h, &Encoding::photon_number(2)).unwrap(), h);

        let mut r = rng(4);
        for e in [Encoding::spin_half(), Encoding::photon_number(2)] {
            for _ in 0..20 {
                let u = haar_unitary(2, &mut r);
                let twice = time_reverse_gate(&time_reverse_gate(&u, &e).unwrap(), &e).unwrap();
                assert!(twice.max_abs_diff(&u) < 1e-12);
                assert!(is_unitary(&time_reverse_gate(&u, &e).unwrap(), 1e-12).unwrap());
            }
        }
        let non_unitary = ComplexMatrix::from_real_diagonal(&[1.0, 0.5]);
        assert!(matches!(
            time_reverse_gate(&non_unitary, &Encoding::spin_half()),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            time_reverse_gate(&ComplexMatrix::identity(3), &Encoding::spin_half()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    fn chi_relation_defect(psi: &EntangledState, e: &Encoding) -> f64 {
        let chi = chi_of_state(psi, e).unwrap();
        let moved = e.canonical_state().apply_local(0, &chi).unwrap();
        moved.state().max_abs_diff(psi.state())
    }

    #[test]
    fn chi_relates_every_maximal_state_to_the_mirror() {
        let spin = Encoding::spin_half();
        let phi_t = spin.canonical_state();
        let chi = chi_of_state(&phi_t, &spin).unwrap();
        // Ψ = Φ_T: χ = M̃_T·M_T* = γ²·1
        assert!(chi.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(chi_relation_defect(&phi_t, &spin) < 1e-15);

        let chi = chi_of_state(&BellState::PhiPlus.state(), &spin).unwrap();
        assert!(chi.max_abs_diff(&ComplexMatrix::pauli_y().scale_real(-1.0)) < 1e-15);
        assert!(chi_relation_defect(&BellState::PhiPlus.state(), &spin) < 1e-15);

        let mut r = rng(5);
        for e in [Encoding::spin_half(), Encoding::photon_number(2)] {
            for _ in 0..20 {
                let psi = BellState::PhiPlus.state().apply_local(0, &haar_unitary(2, &mut r)).unwrap();
                assert!(chi_relation_defect(&psi, &e) < 1e-12);
            }
        }
        assert!(matches!(
            chi_of_state(&EntangledState::partially_entangled(0.3), &spin),
            Err(Error::NotMaximallyEntangled { .. })
        ));
    }

    #[test]
    fn backward_state_forms_agree() {
        let zero = PureState::basis(2, 0).unwrap();
        let b = backward_state(&zero, &BellState::PhiPlus.state()).unwrap();
        assert!(b.state.max_abs_diff(&zero.scale(c(FRAC_1_SQRT_2, 0.0))) < 1e-15);
        let expected = ComplexMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(b.rho_tr.matrix().max_abs_diff(&expected) < 1e-15);

        let one = PureState::basis(2, 1).unwrap();
        let prod = EntangledState::new(PureState::basis(4, 0).unwrap()).unwrap();
        let b = backward_state(&one, &prod).unwrap();
        assert_eq!(b.state.norm_sqr(), 0.0);

        let mut r = rng(6);
        for _ in 0..50 {
            let psi = random_state(2, &mut r);
            let phi = BellState::PhiPlus.state().apply_local(1, &haar_unitary(2, &mut r)).unwrap();
            let b = backward_state(&psi, &phi).unwrap();
            assert!((b.state.norm_sqr() - 0.5).abs() < 1e-12);
            assert!(b.rho_tr.matrix().max_abs_diff(&b.state.outer()) < 1e-12);
        }
        assert!(matches!(
            backward_state(&PureState::basis(3, 0).unwrap(), &prod),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
