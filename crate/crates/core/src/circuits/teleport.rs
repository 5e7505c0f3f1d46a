//! The three-carrier teleportation-like circuit and its two evaluations.
//!
//! Carrier 1 holds the input `|ψ⟩`, carriers 2 and 3 start in `|Φ⟩`. Local
//! unitaries `U`, `V`, `W` act on carriers 1, 2, 3, then carriers 1 and 2 are
//! post-selected on `|Ω⟩`. The forward oracle does this with explicit tensor
//! products; the time-flow evaluation follows a single qubit through the
//! carriers, reversing its arrow of time at each entangled state.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::OutcomeReport;
use crate::error::{Error, Result};
use crate::linalg::{apply_local, unitarity_defect, ComplexMatrix, PureState, DEFAULT_TOL};
use crate::random::haar_unitary;
use crate::timeflow::{
    chi_of_state, m_of_state, maximal_entanglement_defect, time_reverse_gate, time_reverse_state,
    Encoding, EntangledState,
};

#[derive(Clone, Debug, PartialEq)]
pub struct TeleportCircuit {
    d: usize,
    u: ComplexMatrix,
    v: ComplexMatrix,
    w: ComplexMatrix,
    phi: EntangledState,
    omega: EntangledState,
}

impl TeleportCircuit {
    /// Requires unitary gates and maximally entangled `phi` and `omega`.
    pub fn new(
        u: ComplexMatrix,
        v: ComplexMatrix,
        w: ComplexMatrix,
        phi: EntangledState,
        omega: EntangledState,
    ) -> Result<Self> {
        let c = Self::with_any_phi(u, v, w, phi, omega)?;
        let deviation = maximal_entanglement_defect(&c.phi);
        if deviation > DEFAULT_TOL {
            return Err(Error::NotMaximallyEntangled { deviation });
        }
        Ok(c)
    }

    /// Like [`TeleportCircuit::new`] but accepts any initial pair `phi`; only
    /// the forward oracle and the non-maximal analysis accept such circuits.
    pub fn with_any_phi(
        u: ComplexMatrix,
        v: ComplexMatrix,
        w: ComplexMatrix,
        phi: EntangledState,
        omega: EntangledState,
    ) -> Result<Self> {
        let d = phi.local_dim();
        if omega.local_dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "Φ has local dimension {d} but Ω has {}",
                omega.local_dim()
            )));
        }
        for (name, g) in [("U", &u), ("V", &v), ("W", &w)] {
            if g.rows() != d || g.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{} but carriers are {d}-level",
                    g.rows(),
                    g.cols()
                )));
            }
            let deviation = unitarity_defect(g)?;
            if deviation > DEFAULT_TOL {
                return Err(Error::NotUnitary { deviation });
            }
        }
        let deviation = maximal_entanglement_defect(&omega);
        if deviation > DEFAULT_TOL {
            return Err(Error::NotMaximallyEntangled { deviation });
        }
        Ok(Self { d, u, v, w, phi, omega })
    }

    /// Plain teleportation: identity gates, `Φ = Ω = Σ|ii⟩/√d`.
    pub fn identity(d: usize) -> Self {
        let id = ComplexMatrix::identity(d);
        let me = EntangledState::maximally_entangled(d);
        Self::new(id.clone(), id.clone(), id, me.clone(), me).expect("valid identity circuit")
    }

    /// Haar-random gates and random maximally entangled `Φ`, `Ω`.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let base = EntangledState::maximally_entangled(d);
        let phi = base.apply_local(0, &haar_unitary(d, rng)).expect("local unitary");
        let omega = base.apply_local(1, &haar_unitary(d, rng)).expect("local unitary");
        Self::new(
            haar_unitary(d, rng),
            haar_unitary(d, rng),
            haar_unitary(d, rng),
            phi,
            omega,
        )
        .expect("random circuit is valid")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn phi(&self) -> &EntangledState {
        &self.phi
    }

    pub fn omega(&self) -> &EntangledState {
        &self.omega
    }

    pub fn phi_is_maximal(&self) -> bool {
        maximal_entanglement_defect(&self.phi) <= DEFAULT_TOL
    }

    fn check_input(&self, psi: &PureState) -> Result<()> {
        if psi.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "{}-dimensional input to a circuit over {}-level carriers",
                psi.dim(),
                self.d
            )));
        }
        Ok(())
    }

    fn require_maximal_phi(&self) -> Result<()> {
        let deviation = maximal_entanglement_defect(&self.phi);
        if deviation > DEFAULT_TOL {
            return Err(Error::NotMaximallyEntangled { deviation });
        }
        Ok(())
    }
}

/// Clock-and-shift operator `X^a Z^b` on a `d`-level carrier.
pub fn weyl_operator(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    let omega = std::f64::consts::TAU / d as f64;
    for j in 0..d {
        m[((j + a) % d, j)] = Complex64::from_polar(1.0, omega * ((b * j) % d) as f64);
    }
    m
}

/// Orthonormal maximally entangled basis `(X^a Z^b ⊗ 1)|Ω⟩`, indexed by
/// `a·d + b`; element 0 is `|Ω⟩` itself.
pub fn weyl_basis(omega: &EntangledState) -> Vec<PureState> {
    let d = omega.local_dim();
    let mut basis = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let amps = apply_local(omega.state().amplitudes(), &[d, d], 0, &weyl_operator(d, a, b));
            basis.push(PureState::unnormalized(amps).expect("finite"));
        }
    }
    basis
}

/// Tensor-product evaluation: the conditional state of carrier 3 for every
/// element of the Weyl basis built on `Ω` (key 0 is `Ω`). Zero-probability
/// outcomes are omitted.
pub fn forward_oracle(c: &TeleportCircuit, psi: &PureState) -> Result<BTreeMap<usize, OutcomeReport>> {
    c.check_input(psi)?;
    let d = c.d;
    let dims = [d, d, d];
    let mut amps = psi.kron(c.phi.state()).into_amplitudes();
    amps = apply_local(&amps, &dims, 0, &c.u);
    amps = apply_local(&amps, &dims, 1, &c.v);
    amps = apply_local(&amps, &dims, 2, &c.w);

    let mut out = BTreeMap::new();
    for (k, b) in weyl_basis(&c.omega).iter().enumerate() {
        let b = b.amplitudes();
        let eta: Vec<Complex64> = (0..d)
            .map(|l| (0..d * d).map(|ab| b[ab].conj() * amps[ab * d + l]).sum())
            .collect();
        if let Some(report) = OutcomeReport::from_raw(PureState::unnormalized(eta)?) {
            out.insert(k, report);
        }
    }
    Ok(out)
}

/// `(1/d)·W·M_Φ·Ṽ·M_Ω*·U|ψ⟩`, the encoding-free end point of the time-flow
/// chain. Valid for any `Φ`; only `Ω` must be maximally entangled.
pub fn closed_form(c: &TeleportCircuit, psi: &PureState) -> Result<PureState> {
    c.check_input(psi)?;
    let chain = [
        c.u.clone(),
        m_of_state(&c.omega).conjugate(),
        c.v.transpose(),
        m_of_state(&c.phi),
        c.w.clone(),
    ];
    let mut v = psi.clone();
    for m in &chain {
        v = v.apply(m)?;
    }
    Ok(v.scale(Complex64::new(1.0 / c.d as f64, 0.0)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub label: &'static str,
    pub vector: PureState,
}

pub const TRACE_LABELS: [&str; 5] = [
    "input",
    "after_u",
    "first_reversal",
    "second_reversal",
    "output",
];

/// Time-flow chain with the standard gate reversal.
pub fn timeflow_trace(c: &TeleportCircuit, psi: &PureState, e: &Encoding) -> Result<Vec<TraceStep>> {
    timeflow_trace_with(c, psi, e, time_reverse_gate)
}

/// Time-flow chain with a caller-supplied gate reversal (used to inject
/// faults when checking that the verification suites catch them).
///
/// Steps: `|ψ⟩`, `χ_Ω†U|ψ⟩`, the first reversal through `Ω` (carrying
/// `1/√d`), the second reversal through `Φ`, then `W·χ_Φ^tr·V^tr`.
pub fn timeflow_trace_with<F>(
    c: &TeleportCircuit,
    psi: &PureState,
    e: &Encoding,
    reverse_gate: F,
) -> Result<Vec<TraceStep>>
where
    F: Fn(&ComplexMatrix, &Encoding) -> Result<ComplexMatrix>,
{
    c.check_input(psi)?;
    c.require_maximal_phi()?;
    if e.d() != c.d {
        return Err(Error::DimensionMismatch(format!(
            "{}-level encoding for {}-level carriers",
            e.d(),
            c.d
        )));
    }
    let scale = Complex64::new(1.0 / (c.d as f64).sqrt(), 0.0);
    let chi_omega = chi_of_state(&c.omega, e)?;
    let chi_phi = chi_of_state(&c.phi, e)?;

    let after_u = psi.apply(&c.u)?.apply(&chi_omega.dagger())?;
    let first = time_reverse_state(&after_u, e)?.scale(scale);
    let second = time_reverse_state(&first, e)?.scale(scale);
    let output = second
        .apply(&reverse_gate(&c.v, e)?)?
        .apply(&reverse_gate(&chi_phi, e)?)?
        .apply(&c.w)?;

    let vectors = [psi.clone(), after_u, first, second, output];
    Ok(TRACE_LABELS
        .iter()
        .zip(vectors)
        .map(|(&label, vector)| TraceStep { label, vector })
        .collect())
}

/// Time-flow evaluation for the designated outcome `Ω`; the raw vector is
/// the last step of [`timeflow_trace`].
pub fn timeflow_eval(c: &TeleportCircuit, psi: &PureState, e: &Encoding) -> Result<OutcomeReport> {
    let trace = timeflow_trace(c, psi, e)?;
    let raw = trace.into_iter().last().expect("non-empty trace").vector;
    OutcomeReport::from_raw(raw).ok_or(Error::ZeroVector)
}
