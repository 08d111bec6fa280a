//! Solver-free schedulers.

use super::{validate_schedule, Schedule};
use crate::code::{Pauli, StabilizerCode};
use crate::error::{Error, Result};
use crate::tanner::TannerGraph;

/// Greedy earliest-tick placement.
///
/// Gates are placed in `(check, qubit)` order. A gate `(j, l)` goes to the smallest tick that
/// is free for qubit `l` and check `j` and comes after every `(i, l)` with `i < j` on which
/// checks `i` and `j` anticommute locally. Every anticommuting pair is therefore ordered the
/// same way on all of its shared qubits, and there is an even number of those.
pub fn asap_schedule(code: &StabilizerCode) -> Schedule {
    let graph = TannerGraph::from_code(code);
    let mut s = Schedule::empty(code.m(), code.n());
    let mut qubit_busy: Vec<Vec<bool>> = vec![Vec::new(); code.n()];
    let mut check_busy: Vec<Vec<bool>> = vec![Vec::new(); code.m()];
    let busy = |v: &Vec<bool>, t: usize| v.get(t).copied().unwrap_or(false);
    let mark = |v: &mut Vec<bool>, t: usize| {
        if v.len() <= t {
            v.resize(t + 1, false);
        }
        v[t] = true;
    };

    for e in graph.edges() {
        let (j, l) = (e.check, e.qubit);
        let after = graph
            .qubit_edges(l)
            .iter()
            .map(|&f| graph.edges()[f])
            .filter(|f| f.check < j && f.pauli.anticommutes(e.pauli))
            .map(|f| s.get(f.check, l) as usize)
            .max()
            .unwrap_or(0);
        let mut t = after + 1;
        while busy(&qubit_busy[l], t) || busy(&check_busy[j], t) {
            t += 1;
        }
        mark(&mut qubit_busy[l], t);
        mark(&mut check_busy[j], t);
        s.set(j, l, t as i32);
    }
    debug_assert!(validate_schedule(code, &s).is_empty());
    s
}

/// X-labelled gates first, then Z-labelled, then Y-labelled, each class edge-coloured with
/// as many ticks as its maximum degree.
///
/// For CSS codes this is always valid. For codes that mix labels within a check the layer
/// order can break the parity constraint; such schedules are rejected.
pub fn coloration_schedule(code: &StabilizerCode) -> Result<Schedule> {
    let graph = TannerGraph::from_code(code);
    let mut s = Schedule::empty(code.m(), code.n());
    let mut offset = 0;
    for pauli in [Pauli::X, Pauli::Z, Pauli::Y] {
        let class = graph.edges_with_label(pauli);
        if class.is_empty() {
            continue;
        }
        let col = graph.bipartite_edge_coloring(&class);
        for &(e, c) in &col.colors {
            let edge = graph.edges()[e];
            s.set(edge.check, edge.qubit, (offset + c + 1) as i32);
        }
        offset += col.num_colors;
    }
    let violations = validate_schedule(code, &s);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidSchedule(format!(
            "coloration schedule for {} is invalid ({v}); the code mixes Pauli labels within checks",
            code.name()
        )));
    }
    Ok(s)
}
