use super::{Circuit, Instruction, Op, Target};
use crate::code::{CssCode, Pauli, StabilizerCode};
use crate::error::{Error, Result};
use crate::schedule::{validate_schedule, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Z,
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Basis::X),
            "z" | "Z" => Ok(Basis::Z),
            _ => Err(Error::InvalidParameter(format!("basis must be X or Z, got {s:?}"))),
        }
    }
}

/// One round of syndrome extraction.
///
/// Ancillas are reset and put in `|+⟩`, then each tick runs its controlled-Pauli gates
/// (ancilla control, data target), then the ancillas are rotated back and measured with reset.
pub fn build_round(code: &StabilizerCode, s: &Schedule) -> Result<Circuit> {
    if let Some(v) = validate_schedule(code, s).first() {
        return Err(Error::InvalidSchedule(v.to_string()));
    }
    let (n, m) = (code.n(), code.m());
    let mut c = Circuit::new();
    if m == 0 {
        return Ok(c);
    }
    let ancillas: Vec<usize> = (n..n + m).collect();
    c.push(Instruction::new(Op::R, ancillas.iter().copied()));
    c.push(Instruction::new(Op::H, ancillas.iter().copied()));
    c.push(Instruction::tick());

    let depth = s.depth();
    let mut layers: Vec<[Vec<usize>; 3]> = vec![Default::default(); depth];
    for (check, qubit, tick) in s.assigned() {
        let slot = match code.pauli_at(check, qubit).expect("validated schedule only ticks edges") {
            Pauli::X => 0,
            Pauli::Z => 1,
            Pauli::Y => 2,
        };
        layers[tick as usize - 1][slot].extend([n + check, qubit]);
    }
    for (k, layer) in layers.into_iter().enumerate() {
        if k > 0 {
            c.push(Instruction::tick());
        }
        for (op, targets) in [Op::CX, Op::CZ, Op::CY].into_iter().zip(layer) {
            if !targets.is_empty() {
                c.push(Instruction::new(op, targets));
            }
        }
    }

    c.push(Instruction::tick());
    c.push(Instruction::new(Op::H, ancillas.iter().copied()));
    c.push(Instruction::new(Op::MR, ancillas));
    Ok(c)
}

fn detector(recs: impl IntoIterator<Item = usize>) -> Instruction {
    Instruction { op: Op::Detector, arg: None, targets: recs.into_iter().map(Target::Rec).collect() }
}

/// Memory experiment: prepare a logical basis state, run `rounds` rounds, measure all data
/// qubits in `basis`.
///
/// Check outcomes of the prepared basis are compared against nothing in round one; every
/// check is compared with its previous round afterwards. Final detectors compare the last
/// round with the parity of the data measurements, and each logical operator of the basis
/// becomes an observable.
pub fn build_memory_experiment(code: &CssCode, s: &Schedule, rounds: usize, basis: Basis) -> Result<Circuit> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be at least 1".into()));
    }
    let stab = code.to_bsf();
    let round = build_round(&stab, s)?;
    let (n, m, mx) = (code.n(), stab.m(), code.mx());
    let data: Vec<usize> = (0..n).collect();
    // checks deterministic on the prepared product state
    let basis_checks: Vec<usize> = match basis {
        Basis::Z => (mx..m).collect(),
        Basis::X => (0..mx).collect(),
    };

    let mut c = Circuit::new();
    c.push(Instruction::new(Op::R, data.iter().copied()));
    if basis == Basis::X {
        c.push(Instruction::new(Op::H, data.iter().copied()));
    }
    c.push(Instruction::tick());
    for r in 0..rounds {
        c.extend(&round);
        if r == 0 {
            for &i in &basis_checks {
                c.push(detector([m - i]));
            }
        } else {
            for i in 0..m {
                c.push(detector([m - i, 2 * m - i]));
            }
        }
        c.push(Instruction::tick());
    }
    if basis == Basis::X {
        c.push(Instruction::new(Op::H, data.iter().copied()));
    }
    c.push(Instruction::new(Op::M, data));

    let rows = match basis {
        Basis::Z => code.hz(),
        Basis::X => code.hx(),
    };
    for (j, &i) in basis_checks.iter().enumerate() {
        let support = rows.row(j).support();
        c.push(detector(std::iter::once(n + m - i).chain(support.into_iter().map(|q| n - q))));
    }
    let (lx, lz) = code.logical_operators();
    let logicals = match basis {
        Basis::Z => lz,
        Basis::X => lx,
    };
    for (k, l) in logicals.iter().enumerate() {
        c.push(Instruction::with_arg(
            Op::ObservableInclude,
            k as f64,
            l.support().into_iter().map(|q| Target::Rec(n - q)).collect(),
        ));
    }
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{emit_text, parse_text};
    use crate::code::{steane_css, surface_code};
    use crate::gf2::BitMatrix;
    use crate::schedule::{coloration_schedule, solve_optimal, embedded, SearchOptions};
    use std::time::Duration;

    fn optimal(code: &StabilizerCode) -> Schedule {
        let o = SearchOptions::new(Duration::from_secs(30), 1, embedded());
        solve_optimal(code, &o).unwrap().schedule.unwrap()
    }

    #[test]
    fn xzxz_check_gives_alternating_blocks() {
        let code = StabilizerCode::new("g", BitMatrix::from_strs(&["10100101"])).unwrap();
        let mut s = Schedule::empty(1, 4);
        for q in 0..4 {
            s.set(0, q, q as i32 + 1);
        }
        let c = build_round(&code, &s).unwrap();
        let gates: Vec<Op> = c.instructions.iter().map(|i| i.op).filter(|op| op.is_two_qubit()).collect();
        assert_eq!(gates, vec![Op::CX, Op::CZ, Op::CX, Op::CZ]);
        assert_eq!(c.two_qubit_layers(), 4);
        assert_eq!(c.instructions[3], Instruction::new(Op::CX, [4, 0]));
    }

    #[test]
    fn surface3_round_has_four_layers() {
        let code = surface_code(3).unwrap().to_bsf();
        let s = optimal(&code);
        let c = build_round(&code, &s).unwrap();
        assert_eq!(c.two_qubit_layers(), 4);
        assert_eq!(c.instructions.first().unwrap().op, Op::R);
        assert_eq!(c.instructions.last().unwrap().op, Op::MR);
        assert_eq!(c.num_measurements(), code.m());
    }

    #[test]
    fn empty_code_gives_empty_circuit() {
        let code = StabilizerCode::new("e", BitMatrix::zeros(0, 6)).unwrap();
        let c = build_round(&code, &Schedule::empty(0, code.n())).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn invalid_schedule_rejected() {
        let code = surface_code(3).unwrap().to_bsf();
        assert!(build_round(&code, &Schedule::empty(code.m(), code.n())).is_err());
    }

    #[test]
    fn steane_detector_counts() {
        let code = steane_css();
        let s = coloration_schedule(&code.to_bsf()).unwrap();
        let c = build_memory_experiment(&code, &s, 3, Basis::Z).unwrap();
        assert_eq!(c.num_detectors(), 9 + 6 + 3);
        assert_eq!(c.num_observables(), 1);
        let c1 = build_memory_experiment(&code, &s, 1, Basis::Z).unwrap();
        assert_eq!(c1.num_detectors(), 3 + 3);
        let cx = build_memory_experiment(&code, &s, 2, Basis::X).unwrap();
        assert_eq!(cx.num_detectors(), 3 + 6 + 3);
        assert!(build_memory_experiment(&code, &s, 0, Basis::Z).is_err());
    }

    #[test]
    fn surface3_golden() {
        let code = surface_code(3).unwrap();
        let s = coloration_schedule(&code.to_bsf()).unwrap();
        let c = build_memory_experiment(&code, &s, 3, Basis::Z).unwrap();
        let text = emit_text(&c);
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/surface3_memory_z.stim");
        if std::env::var_os("QSCHED_BLESS").is_some() {
            std::fs::write(&path, &text).unwrap();
        }
        let golden = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, golden);
        assert_eq!(parse_text(&golden).unwrap(), c);
    }
}
