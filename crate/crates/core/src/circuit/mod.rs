//! Circuit IR for syndrome extraction and memory experiments.
//!
//! The text form is a subset of the Stim circuit format, one instruction per
//! line. Qubits `0..n` are data qubits and `n..n+m` ancillas, one per check.

mod build;
mod noise;

pub use build::{build_memory_experiment, build_round, Basis};
pub use noise::{insert_noise, NoiseModel};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    R,
    H,
    S,
    CX,
    CZ,
    CY,
    M,
    MR,
    Tick,
    Detector,
    ObservableInclude,
    Depolarize1,
    Depolarize2,
    XError,
}

impl Op {
    pub const ALL: [Op; 14] = [
        Op::R,
        Op::H,
        Op::S,
        Op::CX,
        Op::CZ,
        Op::CY,
        Op::M,
        Op::MR,
        Op::Tick,
        Op::Detector,
        Op::ObservableInclude,
        Op::Depolarize1,
        Op::Depolarize2,
        Op::XError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::R => "R",
            Op::H => "H",
            Op::S => "S",
            Op::CX => "CX",
            Op::CZ => "CZ",
            Op::CY => "CY",
            Op::M => "M",
            Op::MR => "MR",
            Op::Tick => "TICK",
            Op::Detector => "DETECTOR",
            Op::ObservableInclude => "OBSERVABLE_INCLUDE",
            Op::Depolarize1 => "DEPOLARIZE1",
            Op::Depolarize2 => "DEPOLARIZE2",
            Op::XError => "X_ERROR",
        }
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, Op::CX | Op::CZ | Op::CY | Op::Depolarize2)
    }

    pub fn is_unitary(self) -> bool {
        matches!(self, Op::H | Op::S | Op::CX | Op::CZ | Op::CY)
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, Op::M | Op::MR)
    }

    pub fn is_noise(self) -> bool {
        matches!(self, Op::Depolarize1 | Op::Depolarize2 | Op::XError)
    }

    /// Instructions whose targets are measurement records rather than qubits.
    fn takes_records(self) -> bool {
        matches!(self, Op::Detector | Op::ObservableInclude)
    }

    fn takes_arg(self) -> bool {
        matches!(self, Op::ObservableInclude | Op::Depolarize1 | Op::Depolarize2 | Op::XError)
    }
}

impl FromStr for Op {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Op::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::Circuit(format!("unknown instruction {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Qubit(usize),
    /// `rec[-k]`, stored as `k ≥ 1`.
    Rec(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Qubit(q) => write!(f, "{q}"),
            Target::Rec(k) => write!(f, "rec[-{k}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub op: Op,
    pub arg: Option<f64>,
    pub targets: Vec<Target>,
}

impl Instruction {
    pub fn new(op: Op, targets: impl IntoIterator<Item = usize>) -> Self {
        Self { op, arg: None, targets: targets.into_iter().map(Target::Qubit).collect() }
    }

    pub fn with_arg(op: Op, arg: f64, targets: Vec<Target>) -> Self {
        Self { op, arg: Some(arg), targets }
    }

    pub fn tick() -> Self {
        Self { op: Op::Tick, arg: None, targets: Vec::new() }
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().filter_map(|t| match t {
            Target::Qubit(q) => Some(*q),
            Target::Rec(_) => None,
        })
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.op.name())?;
        if let Some(a) = self.arg {
            write!(f, "({a})")?;
        }
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, instr: Instruction) {
        self.instructions.push(instr);
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.instructions.extend(other.instructions.iter().cloned());
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    /// One more than the largest qubit index used.
    pub fn num_qubits(&self) -> usize {
        self.instructions.iter().flat_map(|i| i.qubits()).max().map_or(0, |q| q + 1)
    }

    pub fn num_measurements(&self) -> usize {
        self.count_targets(|op| op.is_measurement())
    }

    pub fn num_detectors(&self) -> usize {
        self.instructions.iter().filter(|i| i.op == Op::Detector).count()
    }

    pub fn num_observables(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| i.op == Op::ObservableInclude)
            .filter_map(|i| i.arg)
            .map(|a| a as usize + 1)
            .max()
            .unwrap_or(0)
    }

    fn count_targets(&self, pred: impl Fn(Op) -> bool) -> usize {
        self.instructions.iter().filter(|i| pred(i.op)).map(|i| i.targets.len()).sum()
    }

    pub fn has_noise(&self) -> bool {
        self.instructions.iter().any(|i| i.op.is_noise())
    }

    /// Number of TICK-separated blocks that contain a two-qubit gate.
    pub fn two_qubit_layers(&self) -> usize {
        let mut layers = 0;
        let mut in_layer = false;
        for i in &self.instructions {
            if i.op == Op::Tick {
                in_layer = false;
            } else if matches!(i.op, Op::CX | Op::CZ | Op::CY) && !in_layer {
                layers += 1;
                in_layer = true;
            }
        }
        layers
    }

    /// Checks target kinds, pair disjointness, argument ranges and that every record
    /// reference points at an earlier measurement.
    pub fn validate(&self) -> Result<()> {
        let mut measured = 0usize;
        for (line, i) in self.instructions.iter().enumerate() {
            let bad = |msg: String| Err(Error::Circuit(format!("instruction {} ({}): {msg}", line + 1, i.op.name())));
            if i.op.takes_arg() != i.arg.is_some() {
                return bad("argument presence mismatch".into());
            }
            if let Some(a) = i.arg {
                let ok = if i.op == Op::ObservableInclude {
                    a >= 0.0 && a.fract() == 0.0
                } else {
                    (0.0..1.0).contains(&a)
                };
                if !ok {
                    return bad(format!("bad argument {a}"));
                }
            }
            if i.op == Op::Tick && !i.targets.is_empty() {
                return bad("TICK takes no targets".into());
            }
            for t in &i.targets {
                match (t, i.op.takes_records()) {
                    (Target::Rec(k), true) => {
                        if *k == 0 || *k > measured {
                            return bad(format!("rec[-{k}] with only {measured} measurements so far"));
                        }
                    }
                    (Target::Qubit(_), false) => {}
                    _ => return bad(format!("unexpected target {t}")),
                }
            }
            if i.op.is_two_qubit() {
                if i.targets.len() % 2 != 0 {
                    return bad("odd number of targets".into());
                }
                let mut seen: Vec<usize> = i.qubits().collect();
                seen.sort_unstable();
                if seen.windows(2).any(|w| w[0] == w[1]) {
                    return bad("qubit used twice".into());
                }
            }
            if i.op.is_measurement() {
                measured += i.targets.len();
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in &self.instructions {
            s.push_str(&i.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Circuit::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let mut parts = line.split_whitespace();
            let head = parts.next().expect("line is non-empty");
            let (name, arg) = match head.find('(') {
                Some(open) => {
                    let inner = head[open + 1..]
                        .strip_suffix(')')
                        .ok_or_else(|| err(format!("unclosed argument in {head:?}")))?;
                    let a: f64 = inner.parse().map_err(|_| err(format!("bad argument {inner:?}")))?;
                    (&head[..open], Some(a))
                }
                None => (head, None),
            };
            let op: Op = name.parse().map_err(|_| err(format!("unknown instruction {name:?}")))?;
            let targets = parts
                .map(|t| {
                    if let Some(body) = t.strip_prefix("rec[-").and_then(|r| r.strip_suffix(']')) {
                        body.parse::<usize>()
                            .ok()
                            .filter(|&k| k > 0)
                            .map(Target::Rec)
                            .ok_or_else(|| err(format!("malformed record reference {t:?}")))
                    } else {
                        t.parse::<usize>().map(Target::Qubit).map_err(|_| err(format!("bad target {t:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            c.push(Instruction { op, arg, targets });
        }
        c.validate()?;
        Ok(c)
    }
}

pub fn emit_text(c: &Circuit) -> String {
    c.to_text()
}

pub fn parse_text(text: &str) -> Result<Circuit> {
    Circuit::parse(text)
}
