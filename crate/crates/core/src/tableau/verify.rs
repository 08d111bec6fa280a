//! Circuit-level checks built on the tableau: Clifford actions, codespace preparation,
//! round verification and detector determinism.

use std::fmt;

use super::{Affine, Gate, Outcome, Tableau};
use crate::circuit::{Circuit, Op, Target};
use crate::code::{Pauli, StabilizerCode};
use crate::error::{Error, Result};

fn gate_of(op: Op) -> Option<Gate> {
    match op {
        Op::H => Some(Gate::H),
        Op::S => Some(Gate::S),
        Op::CX => Some(Gate::Cx),
        Op::CZ => Some(Gate::Cz),
        Op::CY => Some(Gate::Cy),
        _ => None,
    }
}

/// Image of every `X_i` and `Z_i` under conjugation by a Clifford unitary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordAction {
    pub n: usize,
    /// Rows `0..n` are the images of `X_i`, rows `n..2n` of `Z_i`; each is `(x bits, z bits, sign)`.
    pub images: Vec<(Vec<bool>, Vec<bool>, bool)>,
}

impl CliffordAction {
    /// The images satisfy the commutation relations of the inputs.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        let anti = |a: &(Vec<bool>, Vec<bool>, bool), b: &(Vec<bool>, Vec<bool>, bool)| {
            (0..n).filter(|&q| (a.0[q] && b.1[q]) ^ (a.1[q] && b.0[q])).count() % 2 == 1
        };
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                if anti(&self.images[i], &self.images[j]) != (j == i + n) {
                    return false;
                }
            }
        }
        true
    }
}

/// Conjugation action of a circuit made only of H, S, CX, CZ and CY (TICKs are ignored).
pub fn clifford_action(c: &Circuit, n: usize) -> Result<CliffordAction> {
    if c.num_qubits() > n {
        return Err(Error::Circuit(format!("circuit uses {} qubits, action requested on {n}", c.num_qubits())));
    }
    let mut t = Tableau::new(n, 0);
    for i in &c.instructions {
        if i.op == Op::Tick {
            continue;
        }
        let gate = gate_of(i.op).ok_or_else(|| Error::NonUnitary(i.op.name().into()))?;
        let targets: Vec<usize> = i.qubits().collect();
        t.apply(gate, &targets)?;
    }
    let images = (0..2 * n)
        .map(|r| {
            let (x, z, s) = t.row(r);
            (x, z, s.constant_term())
        })
        .collect();
    Ok(CliffordAction { n, images })
}

/// True iff both unitary circuits act identically on every Pauli, signs included.
pub fn circuits_equivalent(a: &Circuit, b: &Circuit) -> Result<bool> {
    let (na, nb) = (a.num_qubits(), b.num_qubits());
    if na != nb {
        return Err(Error::Circuit(format!("qubit counts differ: {na} vs {nb}")));
    }
    Ok(clifford_action(a, na)? == clifford_action(b, nb)?)
}

/// Runs `c` on `t`, returning every measurement outcome in order.
pub fn run_circuit(t: &mut Tableau, c: &Circuit) -> Result<Vec<Outcome>> {
    let mut outcomes = Vec::new();
    for i in &c.instructions {
        let qubits: Vec<usize> = i.qubits().collect();
        match i.op {
            Op::Tick | Op::Detector | Op::ObservableInclude => {}
            Op::R => {
                for q in qubits {
                    t.reset(q)?;
                }
            }
            Op::M => {
                for q in qubits {
                    outcomes.push(t.measure(q)?);
                }
            }
            Op::MR => {
                for q in qubits {
                    outcomes.push(t.measure_reset(q)?);
                }
            }
            op if op.is_noise() => {
                if i.arg.is_some_and(|p| p > 0.0) {
                    return Err(Error::Circuit("noisy circuits cannot be simulated exactly".into()));
                }
            }
            op => {
                let gate = gate_of(op).expect("remaining ops are gates");
                t.apply(gate, &qubits)?;
            }
        }
    }
    Ok(outcomes)
}

/// Measurement outcomes of `c` started from `|0…0⟩`.
pub fn circuit_measurements(c: &Circuit, seed: u64) -> Result<Vec<Outcome>> {
    let mut t = Tableau::new(c.num_qubits(), seed);
    run_circuit(&mut t, c)
}

/// `(deterministic, value)` for every DETECTOR and then every observable, from `|0…0⟩`.
pub fn detector_values(c: &Circuit, seed: u64) -> Result<(Vec<(bool, bool)>, Vec<(bool, bool)>)> {
    let mut t = Tableau::new(c.num_qubits(), seed);
    let mut outcomes: Vec<Outcome> = Vec::new();
    let mut detectors = Vec::new();
    let mut observables: Vec<Affine> = Vec::new();
    let mut chunk = Circuit::new();
    for i in &c.instructions {
        if matches!(i.op, Op::Detector | Op::ObservableInclude) {
            outcomes.extend(run_circuit(&mut t, &chunk)?);
            chunk = Circuit::new();
            let mut acc = Affine::default();
            for target in &i.targets {
                let Target::Rec(k) = target else { continue };
                acc.xor_assign(&outcomes[outcomes.len() - k].expr);
            }
            if i.op == Op::Detector {
                detectors.push(acc);
            } else {
                let idx = i.arg.unwrap_or(0.0) as usize;
                if observables.len() <= idx {
                    observables.resize(idx + 1, Affine::default());
                }
                observables[idx].xor_assign(&acc);
            }
        } else {
            chunk.push(i.clone());
        }
    }
    let judge = |a: &Affine| (a.is_constant(), a.constant_term());
    Ok((detectors.iter().map(judge).collect(), observables.iter().map(judge).collect()))
}

/// A state on `width ≥ n` qubits stabilized by every check on the first `n` qubits.
///
/// Checks are measured in turn; a `−1` outcome is flipped by the destabilizer paired with the
/// check. Returns the tableau and, per check, the sign it is stabilized with: `false` (+1) for
/// every check of a consistent code, `true` only for rows whose sign the others force to −1.
pub fn prepare_codespace(code: &StabilizerCode, width: usize, seed: u64) -> Result<(Tableau, Vec<bool>)> {
    if width < code.n() {
        return Err(Error::InvalidParameter(format!("width {width} below code length {}", code.n())));
    }
    let mut t = Tableau::new(width, seed);
    let mut signs = Vec::with_capacity(code.m());
    for i in 0..code.m() {
        let support = code.check_support(i);
        let out = t.project_plus(&support)?;
        signs.push(out.is_fixed() && out.bit);
    }
    Ok((t, signs))
}

/// First failure found by [`verify_round`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    Nondeterministic { check: usize },
    WrongOutcome { check: usize, expected: bool },
    Syndrome { qubit: usize, pauli: Pauli, check: usize, expected: bool, got: bool },
    StateChanged,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::Nondeterministic { check } => write!(f, "check {check} readout is random"),
            Counterexample::WrongOutcome { check, expected } => {
                write!(f, "check {check} read {} instead of {}", !*expected as u8, *expected as u8)
            }
            Counterexample::Syndrome { qubit, pauli, check, expected, got } => write!(
                f,
                "{pauli} on qubit {qubit}: check {check} read {} but the symplectic product is {}",
                *got as u8, *expected as u8
            ),
            Counterexample::StateChanged => write!(f, "data stabilizer group changed by the round"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub code: String,
    pub determinism: bool,
    pub oracle: Option<bool>,
    pub preservation: bool,
    pub counterexample: Option<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.determinism && self.oracle != Some(false) && self.preservation
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |b: bool| if b { "pass" } else { "fail" };
        writeln!(f, "code: {}", self.code)?;
        writeln!(f, "determinism: {}", v(self.determinism))?;
        write!(f, "oracle: {}", self.oracle.map_or("skipped", v))?;
        if let Some(c) = &self.counterexample {
            write!(f, " ({c})")?;
        }
        writeln!(f)?;
        writeln!(f, "preservation: {}", v(self.preservation))
    }
}

fn readouts(t: &mut Tableau, round: &Circuit, m: usize) -> Result<Vec<Outcome>> {
    let out = run_circuit(t, round)?;
    if out.len() != m {
        return Err(Error::Circuit(format!("round measures {} qubits, code has {m} checks", out.len())));
    }
    Ok(out)
}

/// Checks a single syndrome-extraction round against `code`: readouts on the codespace are
/// deterministic and match the check signs, every single-qubit Pauli error yields its
/// symplectic syndrome, and the data stabilizer group is unchanged by the round.
pub fn verify_round(code: &StabilizerCode, round: &Circuit, seed: u64) -> Result<VerifyReport> {
    verify_round_with(code, round, seed, true)
}

/// [`verify_round`] with the `3n`-run syndrome oracle optional; a skipped oracle reports
/// `None`.
pub fn verify_round_with(code: &StabilizerCode, round: &Circuit, seed: u64, oracle: bool) -> Result<VerifyReport> {
    let (n, m) = (code.n(), code.m());
    let width = round.num_qubits().max(n + m);
    let (prepared, signs) = prepare_codespace(code, width, seed)?;
    let mut report = VerifyReport {
        code: code.name().into(),
        determinism: true,
        oracle: oracle.then_some(true),
        preservation: true,
        counterexample: None,
    };

    let mut t = prepared.clone();
    let out = readouts(&mut t, round, m)?;
    for (check, o) in out.iter().enumerate() {
        if !o.is_fixed() || o.bit != signs[check] {
            report.determinism = false;
            report.counterexample.get_or_insert(if o.is_fixed() {
                Counterexample::WrongOutcome { check, expected: signs[check] }
            } else {
                Counterexample::Nondeterministic { check }
            });
            break;
        }
    }
    report.preservation = prepared.canonical_subgroup(n) == t.canonical_subgroup(n);
    if !report.preservation {
        report.counterexample.get_or_insert(Counterexample::StateChanged);
    }

    let qubits = if oracle { 0..n } else { 0..0 };
    'errors: for qubit in qubits {
        for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
            let mut t = prepared.clone();
            t.apply_pauli(qubit, pauli)?;
            let out = readouts(&mut t, round, m)?;
            for (check, o) in out.iter().enumerate() {
                let expected = signs[check] ^ code.syndrome_bit(check, qubit, pauli);
                if !o.is_fixed() || o.bit != expected {
                    report.oracle = Some(false);
                    report.counterexample.get_or_insert(Counterexample::Syndrome {
                        qubit,
                        pauli,
                        check,
                        expected,
                        got: o.bit,
                    });
                    break 'errors;
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_memory_experiment, build_round, parse_text, Basis, Instruction};
    use crate::code::{steane, steane_css, surface_code};
    use crate::gf2::BitMatrix;
    use crate::schedule::{asap_schedule, coloration_schedule, validate_schedule, Schedule};
    use proptest::prelude::*;

    #[test]
    fn empty_circuit_is_identity() {
        let a = clifford_action(&Circuit::new(), 3).unwrap();
        for (i, (x, z, s)) in a.images.iter().enumerate() {
            assert!(!s);
            for q in 0..3 {
                assert_eq!(x[q], i < 3 && q == i);
                assert_eq!(z[q], i >= 3 && q == i - 3);
            }
        }
        assert!(a.is_symplectic());
    }

    #[test]
    fn rejects_measurements() {
        let c = parse_text("H 0\nM 0\n").unwrap();
        assert!(matches!(clifford_action(&c, 1), Err(Error::NonUnitary(_))));
        let a = parse_text("H 0\n").unwrap();
        let b = parse_text("H 1\n").unwrap();
        assert!(circuits_equivalent(&a, &b).is_err());
        assert!(circuits_equivalent(&a, &a).unwrap());
    }

    /// Two checks `X0 X1` / `Z0 Z1` style, acting on shared qubits 0 and 1 with ancillas 2, 3.
    fn two_checks(order: [(usize, usize); 4]) -> Circuit {
        // (ancilla, data) pairs in time order; ancilla 2 is the X check, 3 the Z check
        let mut c = Circuit::new();
        for (a, d) in order {
            let op = if a == 2 { Op::CX } else { Op::CZ };
            c.push(Instruction::new(op, [a, d]));
            c.push(Instruction::tick());
        }
        c
    }

    #[test]
    fn interleaving_parity_equivalence() {
        // (a): X check fully first; (b): both orders swapped (even); (c): one swapped (odd)
        let a = two_checks([(2, 0), (2, 1), (3, 0), (3, 1)]);
        let b = two_checks([(3, 0), (3, 1), (2, 0), (2, 1)]);
        let c = two_checks([(2, 0), (3, 0), (3, 1), (2, 1)]);
        assert!(circuits_equivalent(&a, &b).unwrap());
        assert!(!circuits_equivalent(&a, &c).unwrap());
    }

    #[test]
    fn steane_codespace() {
        let code = steane();
        let (mut t, signs) = prepare_codespace(&code, 7, 5).unwrap();
        assert!(signs.iter().all(|s| !s));
        for i in 0..code.m() {
            let o = t.measure_pauli(&code.check_support(i)).unwrap();
            assert!(o.deterministic && !o.bit);
        }
    }

    #[test]
    fn steane_x_error_syndrome() {
        let code = steane();
        let round = build_round(&code, &coloration_schedule(&code).unwrap()).unwrap();
        let (prepared, _) = prepare_codespace(&code, 13, 1).unwrap();
        let mut t = prepared.clone();
        t.apply_pauli(0, Pauli::X).unwrap();
        let bits: Vec<bool> = run_circuit(&mut t, &round).unwrap().iter().map(|o| o.bit).collect();
        assert_eq!(bits, vec![false, false, false, true, true, true]);
    }

    #[test]
    fn valid_rounds_pass() {
        for code in [steane(), surface_code(3).unwrap().to_bsf()] {
            for s in [coloration_schedule(&code).unwrap(), asap_schedule(&code)] {
                let round = build_round(&code, &s).unwrap();
                let r = verify_round(&code, &round, 3).unwrap();
                assert!(r.passed(), "{r}");
            }
        }
    }

    /// A round built without schedule validation, to exercise invalid gate orders.
    fn raw_round(code: &StabilizerCode, s: &Schedule) -> Circuit {
        let (n, m) = (code.n(), code.m());
        let mut c = Circuit::new();
        c.push(Instruction::new(Op::R, n..n + m));
        c.push(Instruction::new(Op::H, n..n + m));
        for k in 1..=s.depth() as i32 {
            c.push(Instruction::tick());
            for (check, q, t) in s.assigned() {
                if t == k {
                    let op = match code.pauli_at(check, q).unwrap() {
                        Pauli::X => Op::CX,
                        Pauli::Z => Op::CZ,
                        Pauli::Y => Op::CY,
                    };
                    c.push(Instruction::new(op, [n + check, q]));
                }
            }
        }
        c.push(Instruction::tick());
        c.push(Instruction::new(Op::H, n..n + m));
        c.push(Instruction::new(Op::MR, n..n + m));
        c
    }

    #[test]
    fn parity_violation_breaks_determinism() {
        // XXXX and ZZZZ on four qubits: Z check first on qubit 0 only
        let code = StabilizerCode::new("xz", BitMatrix::from_strs(&["11110000", "00001111"])).unwrap();
        let mut s = Schedule::empty(2, 4);
        for (q, (tx, tz)) in [(2, 1), (3, 4), (5, 6), (7, 8)].into_iter().enumerate() {
            s.set(0, q, tx);
            s.set(1, q, tz);
        }
        assert_eq!(validate_schedule(&code, &s).len(), 1);
        let r = verify_round(&code, &raw_round(&code, &s), 0).unwrap();
        assert!(!r.determinism);
        assert!(!r.passed());
    }

    #[test]
    fn memory_experiment_detectors_deterministic() {
        let code = steane_css();
        let s = coloration_schedule(&code.to_bsf()).unwrap();
        for basis in [Basis::Z, Basis::X] {
            let c = build_memory_experiment(&code, &s, 3, basis).unwrap();
            let (dets, obs) = detector_values(&c, 11).unwrap();
            assert_eq!(dets.len(), 18);
            assert!(dets.iter().all(|&(det, v)| det && !v));
            assert!(obs.iter().all(|&(det, v)| det && !v));
        }
    }

    proptest! {
        #[test]
        fn random_actions_are_symplectic(ops in proptest::collection::vec((0usize..5, 0usize..4, 0usize..4), 0..40)) {
            let mut c = Circuit::new();
            for (g, a, b) in ops {
                let op = [Op::H, Op::S, Op::CX, Op::CZ, Op::CY][g];
                if op.is_two_qubit() {
                    if a == b { continue; }
                    c.push(Instruction::new(op, [a, b]));
                } else {
                    c.push(Instruction::new(op, [a]));
                }
            }
            let action = clifford_action(&c, 4).unwrap();
            prop_assert!(action.is_symplectic());
            prop_assert!(circuits_equivalent(&c, &c.clone()).unwrap_or(true));
        }
    }
}
