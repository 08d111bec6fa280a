use super::{Circuit, Instruction, Op, Target};
use crate::error::{Error, Result};

/// Uniform depolarizing noise of strength `p` on every operation and on idling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("noise strength {p} outside [0, 1)")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

fn channel(op: Op, p: f64, qubits: impl IntoIterator<Item = usize>) -> Instruction {
    Instruction::with_arg(op, p, qubits.into_iter().map(Target::Qubit).collect())
}

/// Adds a depolarizing channel after every reset, Hadamard, measurement and two-qubit gate,
/// and on every qubit left idle by a two-qubit tick-block.
pub fn insert_noise(c: &Circuit, model: NoiseModel) -> Result<Circuit> {
    if c.has_noise() {
        return Err(Error::Circuit("circuit already contains noise channels".into()));
    }
    let p = model.p;
    let width = c.num_qubits();
    let mut out = Circuit::new();
    let mut busy = vec![false; width];
    let mut two_qubit_block = false;

    let close_block = |out: &mut Circuit, busy: &mut Vec<bool>, two_qubit_block: &mut bool| {
        if *two_qubit_block {
            let idle: Vec<usize> = (0..width).filter(|&q| !busy[q]).collect();
            if !idle.is_empty() {
                out.push(channel(Op::Depolarize1, p, idle));
            }
        }
        busy.iter_mut().for_each(|b| *b = false);
        *two_qubit_block = false;
    };

    for instr in &c.instructions {
        if instr.op == Op::Tick {
            close_block(&mut out, &mut busy, &mut two_qubit_block);
            out.push(instr.clone());
            continue;
        }
        out.push(instr.clone());
        for q in instr.qubits() {
            busy[q] = true;
        }
        match instr.op {
            Op::CX | Op::CZ | Op::CY => {
                two_qubit_block = true;
                out.push(channel(Op::Depolarize2, p, instr.qubits()));
            }
            Op::R | Op::H | Op::S | Op::M | Op::MR => out.push(channel(Op::Depolarize1, p, instr.qubits())),
            _ => {}
        }
    }
    close_block(&mut out, &mut busy, &mut two_qubit_block);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_round, parse_text};
    use crate::code::steane;
    use crate::schedule::coloration_schedule;

    #[test]
    fn idle_qubits_in_a_cx_tick() {
        let c = parse_text("R 0 1 2 3\nTICK\nCX 0 1\nTICK\n").unwrap();
        let noisy = insert_noise(&c, NoiseModel::new(0.01).unwrap()).unwrap();
        let text = noisy.to_text();
        assert_eq!(
            text,
            "R 0 1 2 3\nDEPOLARIZE1(0.01) 0 1 2 3\nTICK\nCX 0 1\nDEPOLARIZE2(0.01) 0 1\nDEPOLARIZE1(0.01) 2 3\nTICK\n"
        );
    }

    #[test]
    fn noiseless_subsequence_preserved() {
        let code = steane();
        let c = build_round(&code, &coloration_schedule(&code).unwrap()).unwrap();
        let noisy = insert_noise(&c, NoiseModel::new(0.0).unwrap()).unwrap();
        let stripped: Vec<Instruction> = noisy.instructions.iter().filter(|i| !i.op.is_noise()).cloned().collect();
        assert_eq!(stripped, c.instructions);
        assert!(insert_noise(&noisy, NoiseModel::new(0.0).unwrap()).is_err());
    }

    #[test]
    fn steane_coloration_noise_count() {
        let code = steane();
        let s = coloration_schedule(&code).unwrap();
        let c = build_round(&code, &s).unwrap();
        let noisy = insert_noise(&c, NoiseModel::new(1e-3).unwrap()).unwrap();
        let added = noisy.len() - c.len();
        // R, H, H, MR on ancillas, one channel per gate line, one idle channel per layer
        let gate_lines = c.instructions.iter().filter(|i| i.op.is_two_qubit()).count();
        assert_eq!(added, 4 + gate_lines + s.depth());
        assert_eq!(added, 20);
    }

    #[test]
    fn bad_strength() {
        assert!(NoiseModel::new(1.0).is_err());
        assert!(NoiseModel::new(-0.1).is_err());
    }
}
