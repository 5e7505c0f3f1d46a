//! A small gate-level simulator for multi-carrier circuits with projective
//! measurements. Measured carriers are contracted away; each run returns the
//! unnormalized conditional state of the surviving carriers per outcome.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{OutcomeReport, PROBABILITY_FLOOR};
use crate::error::{Error, Result};
use crate::linalg::{apply_local, unitarity_defect, ComplexMatrix, PureState, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq)]
pub enum GateEvent {
    Gate { carrier: usize, matrix: ComplexMatrix },
    Cnot { control: usize, target: usize },
    Cphase { control: usize, target: usize },
    /// Projective measurement of `carriers` (in the listed order). `None`
    /// means the computational basis; otherwise an orthonormal basis over
    /// the joint space of the listed carriers.
    Measure { carriers: Vec<usize>, basis: Option<Vec<PureState>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateCircuit {
    dims: Vec<usize>,
    events: Vec<GateEvent>,
}

impl GateCircuit {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidCircuit("carrier dimensions must be positive".into()));
        }
        Ok(Self { dims, events: Vec::new() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn events(&self) -> &[GateEvent] {
        &self.events
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn push(&mut self, event: GateEvent) -> Result<&mut Self> {
        self.validate_event(&event)?;
        self.events.push(event);
        Ok(self)
    }

    pub fn gate(&mut self, carrier: usize, matrix: ComplexMatrix) -> Result<&mut Self> {
        self.push(GateEvent::Gate { carrier, matrix })
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(GateEvent::Cnot { control, target })
    }

    pub fn cphase(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(GateEvent::Cphase { control, target })
    }

    pub fn measure(&mut self, carriers: Vec<usize>) -> Result<&mut Self> {
        self.push(GateEvent::Measure { carriers, basis: None })
    }

    pub fn measure_in(&mut self, carriers: Vec<usize>, basis: Vec<PureState>) -> Result<&mut Self> {
        self.push(GateEvent::Measure { carriers, basis: Some(basis) })
    }

    fn check_carrier(&self, c: usize) -> Result<()> {
        if c >= self.dims.len() {
            return Err(Error::IndexOutOfRange { index: c, len: self.dims.len() });
        }
        Ok(())
    }

    fn validate_event(&self, event: &GateEvent) -> Result<()> {
        match event {
            GateEvent::Gate { carrier, matrix } => {
                self.check_carrier(*carrier)?;
                let d = self.dims[*carrier];
                if matrix.rows() != d || matrix.cols() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "{}x{} gate on {d}-level carrier {carrier}",
                        matrix.rows(),
                        matrix.cols()
                    )));
                }
                let deviation = unitarity_defect(matrix)?;
                if deviation > DEFAULT_TOL {
                    return Err(Error::NotUnitary { deviation });
                }
            }
            GateEvent::Cnot { control, target } | GateEvent::Cphase { control, target } => {
                self.check_carrier(*control)?;
                self.check_carrier(*target)?;
                if control == target {
                    return Err(Error::InvalidCircuit(format!(
                        "control and target are both carrier {control}"
                    )));
                }
                if self.dims[*control] != 2 || self.dims[*target] != 2 {
                    return Err(Error::InvalidCircuit(
                        "controlled gates act on two-level carriers".into(),
                    ));
                }
            }
            GateEvent::Measure { carriers, basis } => {
                if carriers.is_empty() {
                    return Err(Error::InvalidCircuit("measurement of no carriers".into()));
                }
                for (i, c) in carriers.iter().enumerate() {
                    self.check_carrier(*c)?;
                    if carriers[..i].contains(c) {
                        return Err(Error::InvalidCircuit(format!("carrier {c} listed twice")));
                    }
                }
                if let Some(basis) = basis {
                    let joint: usize = carriers.iter().map(|&c| self.dims[c]).product();
                    validate_basis(basis, joint)?;
                }
            }
        }
        Ok(())
    }
}

fn validate_basis(basis: &[PureState], dim: usize) -> Result<()> {
    if basis.len() != dim {
        return Err(Error::InvalidCircuit(format!(
            "measurement basis has {} elements for a {dim}-dimensional space",
            basis.len()
        )));
    }
    for (i, x) in basis.iter().enumerate() {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "basis element {i} has dimension {} instead of {dim}",
                x.dim()
            )));
        }
        for (j, y) in basis.iter().enumerate().take(i + 1) {
            let expected = if i == j { 1.0 } else { 0.0 };
            let dev = (x.inner(y) - Complex64::new(expected, 0.0)).norm();
            if dev > DEFAULT_TOL {
                return Err(Error::InvalidCircuit(format!(
                    "measurement basis is not orthonormal (elements {j}, {i} deviate by {dev:e})"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
struct Branch {
    key: Vec<usize>,
    amps: Vec<Complex64>,
    live: Vec<usize>,
}

impl Branch {
    fn dims(&self, all: &[usize]) -> Vec<usize> {
        self.live.iter().map(|&c| all[c]).collect()
    }

    fn position(&self, carrier: usize) -> Result<usize> {
        self.live
            .iter()
            .position(|&c| c == carrier)
            .ok_or_else(|| Error::InvalidCircuit(format!("carrier {carrier} was already measured")))
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Runs the circuit on `input`. Outcome keys concatenate the measured
/// indices of every measurement in order; zero-probability branches are
/// dropped. Each report's state lives on the unmeasured carriers (in
/// carrier order).
pub fn run_gate_circuit(
    circuit: &GateCircuit,
    input: &PureState,
) -> Result<BTreeMap<Vec<usize>, OutcomeReport>> {
    if input.dim() != circuit.total_dim() {
        return Err(Error::DimensionMismatch(format!(
            "input has dimension {} but carriers span {}",
            input.dim(),
            circuit.total_dim()
        )));
    }
    let all = circuit.dims();
    let mut branches = vec![Branch {
        key: Vec::new(),
        amps: input.amplitudes().to_vec(),
        live: (0..all.len()).collect(),
    }];

    for event in circuit.events() {
        let mut next = Vec::with_capacity(branches.len());
        for mut b in branches {
            let dims = b.dims(all);
            match event {
                GateEvent::Gate { carrier, matrix } => {
                    let k = b.position(*carrier)?;
                    b.amps = apply_local(&b.amps, &dims, k, matrix);
                    next.push(b);
                }
                GateEvent::Cnot { control, target } | GateEvent::Cphase { control, target } => {
                    let s = strides(&dims);
                    let (sc, st) = (s[b.position(*control)?], s[b.position(*target)?]);
                    let flip = matches!(event, GateEvent::Cnot { .. });
                    for i in 0..b.amps.len() {
                        let c_on = (i / sc) % 2 == 1;
                        let t_on = (i / st) % 2 == 1;
                        if !c_on {
                            continue;
                        }
                        if flip {
                            if !t_on {
                                b.amps.swap(i, i + st);
                            }
                        } else if t_on {
                            b.amps[i] = -b.amps[i];
                        }
                    }
                    next.push(b);
                }
                GateEvent::Measure { carriers, basis } => {
                    next.extend(measure_branch(&b, all, carriers, basis.as_deref())?);
                }
            }
        }
        branches = next;
    }

    let mut out = BTreeMap::new();
    for b in branches {
        if let Some(report) = OutcomeReport::from_raw(PureState::unnormalized(b.amps)?) {
            out.insert(b.key, report);
        }
    }
    Ok(out)
}

fn measure_branch(
    b: &Branch,
    all: &[usize],
    carriers: &[usize],
    basis: Option<&[PureState]>,
) -> Result<Vec<Branch>> {
    let dims = b.dims(all);
    let s = strides(&dims);
    let positions = carriers.iter().map(|&c| b.position(c)).collect::<Result<Vec<_>>>()?;
    let mdims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
    let mstrides = strides(&mdims);
    let joint: usize = mdims.iter().product();
    let rest: Vec<usize> = (0..dims.len()).filter(|p| !positions.contains(p)).collect();
    let rdims: Vec<usize> = rest.iter().map(|&p| dims[p]).collect();
    let rstrides = strides(&rdims);
    let rest_total: usize = rdims.iter().product();

    // For every full index, its (measured, remaining) coordinates.
    let split: Vec<(usize, usize)> = (0..b.amps.len())
        .map(|i| {
            let m = positions
                .iter()
                .zip(&mstrides)
                .map(|(&p, &ms)| ((i / s[p]) % dims[p]) * ms)
                .sum();
            let r = rest
                .iter()
                .zip(&rstrides)
                .map(|(&p, &rs)| ((i / s[p]) % dims[p]) * rs)
                .sum();
            (m, r)
        })
        .collect();

    let live: Vec<usize> = rest.iter().map(|&p| b.live[p]).collect();
    let mut out = Vec::with_capacity(joint);
    for k in 0..joint {
        let mut amps = vec![Complex64::new(0.0, 0.0); rest_total];
        for (i, &(m, r)) in split.iter().enumerate() {
            let coeff = match basis {
                None if m == k => Complex64::new(1.0, 0.0),
                None => continue,
                Some(basis) => basis[k].amplitudes()[m].conj(),
            };
            amps[r] += coeff * b.amps[i];
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= PROBABILITY_FLOOR {
            continue;
        }
        let mut key = b.key.clone();
        if basis.is_none() {
            key.extend(mdims.iter().zip(&mstrides).map(|(&d, &ms)| (k / ms) % d));
        } else {
            key.push(k);
        }
        out.push(Branch { key, amps, live: live.clone() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeflow::BellState;

    #[test]
    fn bell_preparation_and_measurement() {
        let mut c = GateCircuit::new(vec![2, 2]).unwrap();
        c.gate(0, ComplexMatrix::hadamard()).unwrap().cnot(0, 1).unwrap().measure(vec![0, 1]).unwrap();
        let out = run_gate_circuit(&c, &PureState::basis(4, 0).unwrap()).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out[&vec![0, 0]].probability - 0.5).abs() < 1e-15);
        assert!((out[&vec![1, 1]].probability - 0.5).abs() < 1e-15);
        assert_eq!(out[&vec![0, 0]].state.dim(), 1);
    }

    #[test]
    fn entangler_maps_labels_to_bell_states() {
        for bell in BellState::ALL {
            let (z, x) = bell.label_bits();
            let mut c = GateCircuit::new(vec![2, 2]).unwrap();
            c.gate(0, ComplexMatrix::hadamard()).unwrap().cnot(0, 1).unwrap();
            let out = run_gate_circuit(&c, &PureState::basis(4, 2 * z + x).unwrap()).unwrap();
            let got = &out[&vec![]].state;
            assert!(got.max_abs_diff(bell.state().state()) < 1e-15, "{}", bell.name());
        }
    }

    #[test]
    fn cphase_is_symmetric_and_diagonal() {
        let h = ComplexMatrix::hadamard();
        let plus = PureState::basis(2, 0).unwrap().apply(&h).unwrap();
        let input = plus.kron(&plus);
        let mut a = GateCircuit::new(vec![2, 2]).unwrap();
        a.cphase(0, 1).unwrap();
        let mut b = GateCircuit::new(vec![2, 2]).unwrap();
        b.cphase(1, 0).unwrap();
        let ra = &run_gate_circuit(&a, &input).unwrap()[&vec![]].state;
        let rb = &run_gate_circuit(&b, &input).unwrap()[&vec![]].state;
        assert!(ra.max_abs_diff(rb) < 1e-15);
        assert!((ra.amplitudes()[3] + Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_measurement_keeps_remaining_carriers() {
        // |1⟩|0⟩|+⟩ on a qutrit-qubit-qubit register, measure carrier 1.
        let h = ComplexMatrix::hadamard();
        let plus = PureState::basis(2, 0).unwrap().apply(&h).unwrap();
        let input = PureState::basis(3, 1).unwrap().kron(&PureState::basis(2, 0).unwrap()).kron(&plus);
        let mut c = GateCircuit::new(vec![3, 2, 2]).unwrap();
        c.measure(vec![1]).unwrap();
        let out = run_gate_circuit(&c, &input).unwrap();
        assert_eq!(out.len(), 1);
        let expected = PureState::basis(3, 1).unwrap().kron(&plus);
        assert!(out[&vec![0]].state.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn measurement_in_bell_basis() {
        let basis: Vec<PureState> = BellState::ALL.iter().map(|b| b.state().state().clone()).collect();
        let mut c = GateCircuit::new(vec![2, 2]).unwrap();
        c.measure_in(vec![0, 1], basis).unwrap();
        let out = run_gate_circuit(&c, BellState::PsiMinus.state().state()).unwrap();
        assert_eq!(out.len(), 1);
        let idx = BellState::ALL.iter().position(|&b| b == BellState::PsiMinus).unwrap();
        assert!((out[&vec![idx]].probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_circuits_are_rejected() {
        let mut c = GateCircuit::new(vec![2, 3]).unwrap();
        assert!(matches!(c.cnot(0, 1), Err(Error::InvalidCircuit(_))));
        assert!(matches!(c.cnot(0, 0), Err(Error::InvalidCircuit(_))));
        assert!(matches!(c.gate(2, ComplexMatrix::hadamard()), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(c.gate(1, ComplexMatrix::hadamard()), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            c.gate(0, ComplexMatrix::from_real_diagonal(&[1.0, 2.0])),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(c.measure(vec![0, 0]), Err(Error::InvalidCircuit(_))));
        let skewed = vec![PureState::basis(2, 0).unwrap(), PureState::basis(2, 0).unwrap()];
        assert!(matches!(c.measure_in(vec![0], skewed), Err(Error::InvalidCircuit(_))));
        assert!(GateCircuit::new(vec![]).is_err());

        let mut m = GateCircuit::new(vec![2, 2]).unwrap();
        m.measure(vec![0]).unwrap().gate(0, ComplexMatrix::pauli_x()).unwrap();
        assert!(matches!(
            run_gate_circuit(&m, &PureState::basis(4, 0).unwrap()),
            Err(Error::InvalidCircuit(_))
        ));
        assert!(matches!(
            run_gate_circuit(&m, &PureState::basis(2, 0).unwrap()),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
