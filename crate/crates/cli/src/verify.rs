//! Property suites behind `timeflow verify`.

use std::f64::consts::PI;

use clap::ValueEnum;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use timeflow_core::circuits::{forward_oracle, timeflow_trace_with, TeleportCircuit};
use timeflow_core::linalg::{
    global_phase_deviation, kron, unitarity_defect, Complex64, ComplexMatrix, PureState,
};
use timeflow_core::random::{haar_unitary, random_state};
use timeflow_core::timeflow::{
    backward_state, chi_of_state, encoding_gamma, is_maximally_entangled, m_of_state,
    spin_expectation, time_reverse_gate, time_reverse_state, Encoding, EntangledState,
};
use timeflow_core::Result as CoreResult;

use crate::error::{CliError, CliResult};
use crate::output::Report;

/// Deliberate defects in the gate time reversal `U^tr = M_T·Ũ·M_T†`, used to
/// check that the suites notice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// `M_T·U†·M_T†`: the complex conjugation of `U†` is dropped.
    SkipConjugation,
    /// `M_T·U·M_T†`: the transpose is dropped.
    SkipTranspose,
}

type Reversal = dyn Fn(&ComplexMatrix, &Encoding) -> CoreResult<ComplexMatrix>;

fn reversal(fault: Option<Fault>) -> Box<Reversal> {
    match fault {
        None => Box::new(time_reverse_gate),
        Some(Fault::SkipConjugation) => Box::new(|u, e| Ok(&(e.m_t() * &u.dagger()) * &e.m_t().dagger())),
        Some(Fault::SkipTranspose) => Box::new(|u, e| Ok(&(e.m_t() * u) * &e.m_t().dagger())),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub trials: usize,
    pub max_deviation: f64,
    pub failures: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub seed: u64,
    pub tol: f64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub fault: Option<Fault>,
    pub properties: Vec<PropertyResult>,
    pub pass: bool,
}

impl Report for VerifyReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["property", "trials", "max_deviation", "failures", "pass"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.properties
            .iter()
            .map(|p| {
                vec![
                    p.name.to_string(),
                    p.trials.to_string(),
                    format!("{:e}", p.max_deviation),
                    p.failures.to_string(),
                    p.pass.to_string(),
                ]
            })
            .collect()
    }

    fn passed(&self) -> bool {
        self.pass
    }
}

/// Independent stream per (property, trial) so results do not depend on
/// evaluation order.
fn trial_rng(seed: u64, property: usize, trial: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(((property as u64) << 32) | trial as u64);
    r
}

struct Ctx<'a> {
    seed: u64,
    tol: f64,
    trials: usize,
    dims: &'a [usize],
    reverse: &'a Reversal,
}

impl Ctx<'_> {
    fn d(&self, trial: usize) -> usize {
        self.dims[trial % self.dims.len()]
    }

    fn encoding(&self, d: usize, trial: usize, r: &mut ChaCha8Rng) -> Encoding {
        if d == 2 && trial % 2 == 1 {
            let alpha = Complex64::from_polar(1.0, r.random_range(0.0..2.0 * PI));
            Encoding::spin_half_with_phase(alpha).expect("unit phase")
        } else {
            Encoding::photon_number(d)
        }
    }

    /// Runs `trial` for every trial index, collecting deviations; a trial
    /// fails when its deviation exceeds `tol`.
    fn run(
        &self,
        index: usize,
        name: &'static str,
        trial: impl Fn(usize, &mut ChaCha8Rng) -> CoreResult<f64>,
    ) -> CoreResult<PropertyResult> {
        let mut max_deviation: f64 = 0.0;
        let mut failures = 0;
        for t in 0..self.trials {
            let dev = trial(t, &mut trial_rng(self.seed, index, t))?;
            // NaN counts as a failure
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(dev <= self.tol) {
                failures += 1;
            }
            max_deviation = max_deviation.max(dev);
        }
        Ok(PropertyResult { name, trials: self.trials, max_deviation, failures, pass: failures == 0 })
    }
}

fn random_maximal(d: usize, r: &mut ChaCha8Rng) -> EntangledState {
    EntangledState::maximally_entangled(d)
        .apply_local(0, &haar_unitary(d, r))
        .expect("local unitary")
}

fn unitarity(ctx: &Ctx, index: usize) -> CoreResult<PropertyResult> {
    // Even trials are maximally entangled by construction, odd trials are
    // generic states; the unitarity test and the entanglement test must
    // agree with each other and with the construction.
    let mut failures = 0;
    let mut max_deviation: f64 = 0.0;
    for t in 0..ctx.trials {
        let mut r = trial_rng(ctx.seed, index, t);
        let d = ctx.d(t);
        let constructed = t % 2 == 0;
        let phi = if constructed {
            random_maximal(d, &mut r).apply_local(1, &haar_unitary(d, &mut r))?
        } else {
            EntangledState::new(random_state(d * d, &mut r))?
        };
        let defect = unitarity_defect(&m_of_state(&phi))?;
        let unitary = defect <= ctx.tol;
        if unitary != is_maximally_entangled(&phi, ctx.tol) || unitary != constructed {
            failures += 1;
        }
        if constructed {
            max_deviation = max_deviation.max(defect);
        }
    }
    Ok(PropertyResult {
        name: "unitary_iff_maximal",
        trials: ctx.trials,
        max_deviation,
        failures,
        pass: failures == 0,
    })
}

fn properties(ctx: &Ctx) -> CoreResult<Vec<PropertyResult>> {
    let reverse = ctx.reverse;
    let mut out = Vec::new();

    out.push(ctx.run(0, "backward_state", |t, r| {
        let d = ctx.d(t);
        let phi = EntangledState::new(random_state(d * d, r))?;
        let psi = random_state(d, r);
        let b = backward_state(&psi, &phi)?;
        Ok(b.rho_tr.matrix().max_abs_diff(&b.state.outer()))
    })?);

    out.push(unitarity(ctx, 1)?);

    out.push(ctx.run(2, "chi_relation", |t, r| {
        let d = ctx.d(t);
        let e = ctx.encoding(d, t, r);
        let psi = random_maximal(d, r);
        let chi = chi_of_state(&psi, &e)?;
        let canon = e.canonical_state();
        let id = ComplexMatrix::identity(d);
        let direct = canon.state().apply(&kron(&chi, &id))?;
        let mirrored = canon.state().apply(&kron(&id, &reverse(&chi, &e)?))?;
        Ok(direct.max_abs_diff(psi.state()).max(mirrored.max_abs_diff(psi.state())))
    })?);

    out.push(ctx.run(3, "gamma_squared", |t, r| {
        let d = ctx.d(t);
        let e = ctx.encoding(d, t, r);
        let g = encoding_gamma(&e)?.value();
        let mm = e.m_t() * &e.m_t().conjugate();
        Ok((g * g - 1.0).abs().max(mm.max_abs_diff(&ComplexMatrix::identity(d).scale_real(g))))
    })?);

    out.push(ctx.run(4, "time_mirror", |t, r| {
        let d = ctx.d(t);
        let e = ctx.encoding(d, t, r);
        let u = haar_unitary(d, r);
        let canon = e.canonical_state();
        let lhs = canon.apply_local(1, &u)?;
        let rhs = canon.apply_local(0, &reverse(&u, &e)?)?;
        Ok(lhs.state().max_abs_diff(rhs.state()))
    })?);

    out.push(ctx.run(5, "encoding_independence", |_, r| {
        let c = TeleportCircuit::random(2, r);
        let psi = random_state(2, r);
        let last = |e: &Encoding| -> CoreResult<PureState> {
            Ok(timeflow_trace_with(&c, &psi, e, reverse)?.pop().expect("non-empty").vector)
        };
        let photon = last(&Encoding::photon_number(2))?;
        let mut worst: f64 = 0.0;
        for k in 0..8 {
            let alpha = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 8.0);
            let spin = last(&Encoding::spin_half_with_phase(alpha)?)?;
            worst = worst.max(global_phase_deviation(&spin, &photon)?);
        }
        Ok(worst)
    })?);

    out.push(ctx.run(6, "semantics_equivalence", |t, r| {
        let d = ctx.d(t);
        let e = ctx.encoding(d, t, r);
        let c = TeleportCircuit::random(d, r);
        let psi = random_state(d, r);
        let raw = timeflow_trace_with(&c, &psi, &e, reverse)?.pop().expect("non-empty").vector;
        let oracle = forward_oracle(&c, &psi)?;
        global_phase_deviation(&raw.normalized()?, &oracle[&0].state)
    })?);

    out.push(ctx.run(7, "probability_law", |t, r| {
        let d = ctx.d(t);
        let e = ctx.encoding(d, t, r);
        let c = TeleportCircuit::random(d, r);
        let psi = random_state(d, r);
        let expected = 1.0 / (d * d) as f64;
        let oracle = forward_oracle(&c, &psi)?;
        let mut dev = (oracle.values().map(|o| o.probability).sum::<f64>() - 1.0).abs();
        if oracle.len() != d * d {
            dev = dev.max(expected);
        }
        for o in oracle.values() {
            dev = dev.max((o.probability - expected).abs());
        }
        let raw = timeflow_trace_with(&c, &psi, &e, reverse)?.pop().expect("non-empty").vector;
        Ok(dev.max((raw.norm_sqr() - expected).abs()))
    })?);

    out.push(ctx.run(8, "spin_flip", |_, r| {
        let alpha = Complex64::from_polar(1.0, r.random_range(0.0..2.0 * PI));
        let e = Encoding::spin_half_with_phase(alpha)?;
        let psi = random_state(2, r);
        let before = spin_expectation(&psi)?;
        let after = spin_expectation(&time_reverse_state(&psi, &e)?)?;
        Ok((0..3).map(|k| (after[k] + before[k]).abs()).fold(0.0, f64::max))
    })?);

    Ok(out)
}

pub fn run(seed: u64, tol: f64, trials: usize, dims: Vec<usize>, fault: Option<Fault>) -> CliResult<VerifyReport> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(CliError::Input("--dims needs carrier dimensions of at least 2".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Input("--tol must be positive".into()));
    }
    let reverse = reversal(fault);
    let ctx = Ctx { seed, tol, trials, dims: &dims, reverse: &*reverse };
    let properties = properties(&ctx)?;
    let pass = properties.iter().all(|p| p.pass);
    Ok(VerifyReport { command: "verify", seed, tol, trials, dims, fault, properties, pass })
}
