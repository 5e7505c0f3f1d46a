use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::dynamics::{apply_coupling, apply_rotation, build_hamiltonian, evolve, gradient_crush, Axis};
use super::pauli::{pseudopure_init, PauliProductState};
use super::SpinSystem;
use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;

/// One step of a pulse sequence. Spin indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    /// Ideal instantaneous `exp(−i·angle·σ/2)` on each listed spin.
    Rotation { spins: Vec<usize>, axis: Axis, angle: f64 },
    /// Ideal `exp(−i·angle/2·Z_a Z_b)`; `angle = π/2` is the controlled-phase
    /// equivalent, taking `1/(2J)` of coupling evolution.
    Coupling { a: usize, b: usize, angle: f64 },
    /// Free evolution under the full Hamiltonian.
    Delay { duration: f64 },
    /// Ideal crusher on the listed spins.
    Gradient { spins: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Acquisition {
    /// Detected spin, 0-based.
    pub spin: usize,
    /// Seconds.
    pub duration: f64,
    pub points: usize,
    /// Exponential line broadening in Hz.
    pub line_broadening: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PulseSequence {
    pub init: Option<PauliProductState>,
    pub events: Vec<Event>,
    pub acquisition: Option<Acquisition>,
}

impl PulseSequence {
    pub fn new(events: Vec<Event>) -> Self {
        Self { init: None, events, acquisition: None }
    }

    pub fn with_init(mut self, init: PauliProductState) -> Self {
        self.init = Some(init);
        self
    }

    pub fn with_acquisition(mut self, acq: Acquisition) -> Self {
        self.acquisition = Some(acq);
        self
    }

    /// Checks indices and numbers against an `n`-spin system.
    pub fn validate(&self, n: usize) -> Result<()> {
        let check = |k: usize| {
            if k >= n {
                Err(Error::InvalidSequence(format!("spin {} does not exist in a {n}-spin system", k + 1)))
            } else {
                Ok(())
            }
        };
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSequence(format!("non-finite {what}")))
            }
        };
        if let Some(init) = &self.init {
            if init.n() != n {
                return Err(Error::InvalidSequence(format!(
                    "initial state {init} has {} spins, system has {n}",
                    init.n()
                )));
            }
        }
        for e in &self.events {
            match e {
                Event::Rotation { spins, angle, .. } => {
                    spins.iter().try_for_each(|&k| check(k))?;
                    finite(*angle, "rotation angle")?;
                }
                Event::Coupling { a, b, angle } => {
                    check(*a)?;
                    check(*b)?;
                    if a == b {
                        return Err(Error::InvalidSequence(format!("coupling of spin {} with itself", a + 1)));
                    }
                    finite(*angle, "coupling angle")?;
                }
                Event::Delay { duration } => {
                    finite(*duration, "delay")?;
                    if *duration < 0.0 {
                        return Err(Error::InvalidSequence("negative delay".into()));
                    }
                }
                Event::Gradient { spins } => {
                    if spins.is_empty() {
                        return Err(Error::InvalidSequence("gradient on an empty spin set".into()));
                    }
                    spins.iter().try_for_each(|&k| check(k))?;
                }
            }
        }
        if let Some(acq) = &self.acquisition {
            check(acq.spin)?;
            if !(acq.duration > 0.0 && acq.duration.is_finite()) || acq.points < 2 {
                return Err(Error::InvalidSequence("acquisition needs duration > 0 and points >= 2".into()));
            }
            finite(acq.line_broadening, "line broadening")?;
        }
        Ok(())
    }

    /// Events up to (not including) the first gradient.
    pub fn before_first_gradient(&self) -> PulseSequence {
        let events = self
            .events
            .iter()
            .take_while(|e| !matches!(e, Event::Gradient { .. }))
            .cloned()
            .collect();
        PulseSequence { init: self.init.clone(), events, acquisition: None }
    }

    /// Four-spin sequence for the acausality experiment, starting from
    /// `X00X`:
    ///
    /// * a) `R_x(π/2)` on spins 2, 3, then a π/2 coupling of 2–3;
    /// * b) π/2 coupling of 1–2;
    /// * c) optionally `R_y(−π/2)` on spin 4 (the choice `a = 1`);
    /// * d) π/2 coupling of 3–4, `R_x(π/2)` on spins 3, 4, and a gradient
    ///   on spins 3, 4.
    ///
    /// Without c) the result is `¼·XXIZ`; with it, `¼·YIZI`.
    pub fn acausal_reconstruction(with_rotation: bool) -> PulseSequence {
        let half = PI / 2.0;
        let mut events = vec![
            Event::Rotation { spins: vec![1, 2], axis: Axis::X, angle: half },
            Event::Coupling { a: 1, b: 2, angle: half },
            Event::Coupling { a: 0, b: 1, angle: half },
        ];
        if with_rotation {
            events.push(Event::Rotation { spins: vec![3], axis: Axis::Y, angle: -half });
        }
        events.extend([
            Event::Coupling { a: 2, b: 3, angle: half },
            Event::Rotation { spins: vec![2, 3], axis: Axis::X, angle: half },
            Event::Gradient { spins: vec![2, 3] },
        ]);
        PulseSequence::new(events).with_init("X00X".parse().expect("valid label"))
    }
}

/// Applies `events` to `rho` in order.
pub fn run_events(s: &SpinSystem, rho: &DensityMatrix, events: &[Event]) -> Result<DensityMatrix> {
    if rho.dim() != s.dim() {
        return Err(Error::InvalidSequence(format!(
            "{}-dimensional state for a {}-spin system",
            rho.dim(),
            s.n()
        )));
    }
    let seq = PulseSequence::new(events.to_vec());
    seq.validate(s.n())?;
    let mut rho = rho.clone();
    for e in events {
        rho = match e {
            Event::Rotation { spins, axis, angle } => apply_rotation(&rho, spins, *axis, *angle)?,
            Event::Coupling { a, b, angle } => apply_coupling(s, &rho, *a, *b, *angle)?,
            Event::Delay { duration } => evolve(&rho, &build_hamiltonian(s), *duration)?,
            Event::Gradient { spins } => gradient_crush(&rho, spins)?,
        };
    }
    Ok(rho)
}

/// Folds the sequence's events over the deviation matrix of `init`.
pub fn run_sequence(s: &SpinSystem, init: &PauliProductState, seq: &PulseSequence) -> Result<DensityMatrix> {
    if init.n() != s.n() {
        return Err(Error::InvalidSequence(format!(
            "initial state {init} has {} spins, system has {}",
            init.n(),
            s.n()
        )));
    }
    run_events(s, &pseudopure_init(init), &seq.events)
}

/// Accepts plain numbers (radians), `deg` suffixes and multiples of `pi`
/// such as `pi/2`, `-3pi/4` or `2*pi`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim().to_ascii_lowercase();
    if let Some(deg) = t.strip_suffix("deg") {
        return deg.trim().parse::<f64>().ok().map(|d| d.to_radians());
    }
    let Some(pi_at) = t.find("pi") else {
        return t.parse::<f64>().ok();
    };
    let coeff = t[..pi_at].trim().trim_end_matches('*').trim();
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let tail = t[pi_at + 2..].trim();
    let denom = if tail.is_empty() {
        1.0
    } else {
        tail.strip_prefix('/')?.trim().parse::<f64>().ok()?
    };
    let v = coeff * PI / denom;
    v.is_finite().then_some(v)
}

fn parse_spins(text: &str, line: usize) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k - 1),
                _ => Err(Error::Parse { line, message: format!("bad spin index '{t}' (spins are numbered from 1)") }),
            }
        })
        .collect()
}

fn parse_number(text: &str, what: &str, line: usize) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse { line, message: format!("bad {what} '{}'", text.trim()) })
}

fn parse_event(words: &[&str], line: usize) -> Result<Option<Event>> {
    let err = |message: String| Error::Parse { line, message };
    let angle = |w: &str| parse_angle(w).ok_or_else(|| err(format!("bad angle '{w}'")));
    let event = match words {
        ["rotate", spins, axis, ang] => {
            let (negate, axis_name) = match axis.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, axis.strip_prefix('+').unwrap_or(axis)),
            };
            let axis = axis_name.parse::<Axis>().map_err(|e| err(e.to_string()))?;
            let a = angle(ang)?;
            Event::Rotation { spins: parse_spins(spins, line)?, axis, angle: if negate { -a } else { a } }
        }
        ["couple", pair, ang] => match parse_spins(pair, line)?.as_slice() {
            [a, b] => Event::Coupling { a: *a, b: *b, angle: angle(ang)? },
            _ => return Err(err("couple needs exactly two spins".into())),
        },
        ["delay", t] => Event::Delay { duration: parse_number(t, "delay", line)? },
        ["gradient", spins] => Event::Gradient { spins: parse_spins(spins, line)? },
        [kind, ..] if ["rotate", "couple", "delay", "gradient"].contains(kind) => {
            return Err(err(format!("wrong number of fields for '{kind}'")))
        }
        _ => return Ok(None),
    };
    Ok(Some(event))
}

fn parse_acquisition(fields: &[&str], line: usize) -> Result<Acquisition> {
    let mut spin = None;
    let mut duration = None;
    let mut points = None;
    let mut lb = 0.0;
    for f in fields {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| Error::Parse { line, message: format!("expected key=value, got '{f}'") })?;
        match k {
            "spin" => spin = Some(parse_spins(v, line)?),
            "duration" => duration = Some(parse_number(v, "duration", line)?),
            "points" => {
                points = Some(v.parse::<usize>().map_err(|_| Error::Parse {
                    line,
                    message: format!("bad point count '{v}'"),
                })?)
            }
            "lb" => lb = parse_number(v, "line broadening", line)?,
            other => return Err(Error::Parse { line, message: format!("unknown acquisition key '{other}'") }),
        }
    }
    let missing = |k: &str| Error::Parse { line, message: format!("acquire is missing '{k}'") };
    let spin = match spin.ok_or_else(|| missing("spin"))?.as_slice() {
        [k] => *k,
        _ => return Err(Error::Parse { line, message: "acquire detects exactly one spin".into() }),
    };
    Ok(Acquisition {
        spin,
        duration: duration.ok_or_else(|| missing("duration"))?,
        points: points.ok_or_else(|| missing("points"))?,
        line_broadening: lb,
    })
}

/// Line-oriented text form; see the README for the grammar.
impl FromStr for PulseSequence {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut seq = PulseSequence::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let keyword = words[0].to_ascii_lowercase();
            let mut lowered = vec![keyword.as_str()];
            lowered.extend(&words[1..]);
            match keyword.as_str() {
                "init" => {
                    let [_, label] = lowered.as_slice() else {
                        return Err(Error::Parse { line, message: "init takes one label".into() });
                    };
                    if seq.init.is_some() {
                        return Err(Error::Parse { line, message: "duplicate init".into() });
                    }
                    seq.init = Some(label.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?);
                }
                "acquire" => {
                    if seq.acquisition.is_some() {
                        return Err(Error::Parse { line, message: "duplicate acquire".into() });
                    }
                    seq.acquisition = Some(parse_acquisition(&lowered[1..], line)?);
                }
                _ => match parse_event(&lowered, line)? {
                    Some(e) => seq.events.push(e),
                    None => return Err(Error::Parse { line, message: format!("unknown event '{keyword}'") }),
                },
            }
        }
        Ok(seq)
    }
}

fn join_spins(spins: &[usize]) -> String {
    spins.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(init) = &self.init {
            writeln!(f, "init {init}")?;
        }
        for e in &self.events {
            match e {
                Event::Rotation { spins, axis, angle } => writeln!(f, "rotate {} {axis} {angle}", join_spins(spins))?,
                Event::Coupling { a, b, angle } => writeln!(f, "couple {},{} {angle}", a + 1, b + 1)?,
                Event::Delay { duration } => writeln!(f, "delay {duration}")?,
                Event::Gradient { spins } => writeln!(f, "gradient {}", join_spins(spins))?,
            }
        }
        if let Some(a) = &self.acquisition {
            writeln!(
                f,
                "acquire spin={} duration={} points={} lb={}",
                a.spin + 1,
                a.duration,
                a.points,
                a.line_broadening
            )?;
        }
        Ok(())
    }
}
