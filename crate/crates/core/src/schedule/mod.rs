//! Syndrome-extraction schedules: the tick of every check–qubit gate.
//!
//! A schedule is valid when it satisfies three constraints:
//! every qubit (data or ancilla) takes part in at most one gate per tick,
//! every Tanner edge gets exactly one tick, and for every pair of checks the
//! number of shared anticommuting qubits on which the first check acts before
//! the second is even.

mod baseline;
mod encode;
mod record;
mod search;

pub use baseline::{asap_schedule, coloration_schedule};
pub use encode::{encode, encode_symmetric, Encoding};
pub use record::{Entry, Method, Provenance, ScheduleRecord, SearchEntry, Status};
pub use search::{compile, embedded, solve_optimal, CompileResult, DepthRecord, DepthSearchLog, SearchOptions, SearchResult};

use serde::{Deserialize, Serialize};

use crate::code::StabilizerCode;
use crate::tanner::TannerGraph;

/// Tick per `(check, qubit)`; ticks are 1-based and `-1` marks a non-edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Schedule {
    m: usize,
    n: usize,
    ticks: Vec<i32>,
}

impl Schedule {
    /// All entries `-1`.
    pub fn empty(m: usize, n: usize) -> Self {
        Self { m, n, ticks: vec![-1; m * n] }
    }

    /// One tick per edge of `graph`, in edge order.
    pub fn from_edge_ticks(graph: &TannerGraph, ticks: &[u32]) -> Self {
        assert_eq!(ticks.len(), graph.edges().len());
        let mut s = Self::empty(graph.num_checks(), graph.num_qubits());
        for (e, &t) in graph.edges().iter().zip(ticks) {
            s.set(e.check, e.qubit, t as i32);
        }
        s
    }

    pub fn num_checks(&self) -> usize {
        self.m
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Tick of `(check, qubit)`, or `-1`; out-of-range positions read as `-1`.
    pub fn get(&self, check: usize, qubit: usize) -> i32 {
        if check < self.m && qubit < self.n {
            self.ticks[check * self.n + qubit]
        } else {
            -1
        }
    }

    pub fn set(&mut self, check: usize, qubit: usize, tick: i32) {
        self.ticks[check * self.n + qubit] = tick;
    }

    /// Largest assigned tick, 0 for an empty schedule.
    pub fn depth(&self) -> usize {
        self.ticks.iter().copied().max().unwrap_or(0).max(0) as usize
    }

    /// Ticks of the graph's edges in edge order.
    pub fn edge_ticks(&self, graph: &TannerGraph) -> Vec<i32> {
        graph.edges().iter().map(|e| self.get(e.check, e.qubit)).collect()
    }

    /// `(check, qubit, tick)` for every assigned entry, ordered by check then qubit.
    pub fn assigned(&self) -> impl Iterator<Item = (usize, usize, i32)> + '_ {
        self.ticks
            .iter()
            .enumerate()
            .filter(|(_, &t)| t != -1)
            .map(move |(idx, &t)| (idx / self.n, idx % self.n, t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    DataOccupation,
    AncillaOccupation,
    Integrality,
    CommutativityParity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Several checks touch `qubit` at `tick`.
    DataOccupation { qubit: usize, tick: i32, checks: Vec<usize> },
    /// `check` touches several qubits at `tick`.
    AncillaOccupation { check: usize, tick: i32, qubits: Vec<usize> },
    /// An edge without a tick in `[1, depth]`, or a non-edge carrying a tick.
    Integrality { check: usize, qubit: usize, tick: i32 },
    /// Odd number of qubits in `shared` on which `first` acts before `second`.
    CommutativityParity { first: usize, second: usize, shared: Vec<usize>, earlier: Vec<usize> },
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self {
            Violation::DataOccupation { .. } => ViolationKind::DataOccupation,
            Violation::AncillaOccupation { .. } => ViolationKind::AncillaOccupation,
            Violation::Integrality { .. } => ViolationKind::Integrality,
            Violation::CommutativityParity { .. } => ViolationKind::CommutativityParity,
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DataOccupation { qubit, tick, checks } => {
                write!(f, "data qubit {qubit} used by checks {checks:?} at tick {tick}")
            }
            Violation::AncillaOccupation { check, tick, qubits } => {
                write!(f, "ancilla of check {check} used on qubits {qubits:?} at tick {tick}")
            }
            Violation::Integrality { check, qubit, tick } => {
                write!(f, "entry ({check}, {qubit}) has invalid tick {tick}")
            }
            Violation::CommutativityParity { first, second, shared, earlier } => write!(
                f,
                "checks {first} and {second}: check {first} is earlier on {earlier:?} of anticommuting qubits {shared:?} (odd)"
            ),
        }
    }
}

/// Checks the three schedule constraints directly on the tick table.
///
/// Works from the code matrix alone, without the Tanner graph or the encoder.
pub fn validate_schedule(code: &StabilizerCode, s: &Schedule) -> Vec<Violation> {
    let (m, n) = (code.m(), code.n());
    let mut out = Vec::new();
    let is_edge = |i: usize, q: usize| code.x_bit(i, q) || code.z_bit(i, q);
    let depth = s.depth() as i32;

    for i in 0..m {
        for q in 0..n {
            let t = s.get(i, q);
            let ok = if is_edge(i, q) { (1..=depth).contains(&t) } else { t == -1 };
            if !ok {
                out.push(Violation::Integrality { check: i, qubit: q, tick: t });
            }
        }
    }
    // entries outside the code's shape can only be spurious ticks
    for (i, q, t) in s.assigned() {
        if i >= m || q >= n {
            out.push(Violation::Integrality { check: i, qubit: q, tick: t });
        }
    }

    for q in 0..n {
        let mut by_tick: std::collections::BTreeMap<i32, Vec<usize>> = Default::default();
        for i in 0..m {
            let t = s.get(i, q);
            if t >= 1 {
                by_tick.entry(t).or_default().push(i);
            }
        }
        for (tick, checks) in by_tick {
            if checks.len() > 1 {
                out.push(Violation::DataOccupation { qubit: q, tick, checks });
            }
        }
    }
    for i in 0..m {
        let mut by_tick: std::collections::BTreeMap<i32, Vec<usize>> = Default::default();
        for q in 0..n {
            let t = s.get(i, q);
            if t >= 1 {
                by_tick.entry(t).or_default().push(q);
            }
        }
        for (tick, qubits) in by_tick {
            if qubits.len() > 1 {
                out.push(Violation::AncillaOccupation { check: i, tick, qubits });
            }
        }
    }

    let supports: Vec<Vec<usize>> =
        (0..m).map(|i| (0..n).filter(|&q| is_edge(i, q)).collect()).collect();
    for i in 0..m {
        for j in i + 1..m {
            let shared: Vec<usize> = supports[i]
                .iter()
                .copied()
                .filter(|&l| (code.x_bit(i, l) & code.z_bit(j, l)) ^ (code.z_bit(i, l) & code.x_bit(j, l)))
                .collect();
            if shared.is_empty() {
                continue;
            }
            let earlier: Vec<usize> = shared.iter().copied().filter(|&l| s.get(i, l) < s.get(j, l)).collect();
            if earlier.len() % 2 == 1 {
                out.push(Violation::CommutativityParity { first: i, second: j, shared, earlier });
            }
        }
    }
    out
}

/// Depth lower bound: the maximum degree of the Tanner graph.
pub fn lower_bound(code: &StabilizerCode) -> usize {
    TannerGraph::from_code(code).max_degree()
}

/// Unordered check pairs with a nonempty set of locally anticommuting qubits, found through
/// shared qubits only.
pub(crate) fn anticommuting_pairs(code: &StabilizerCode, graph: &TannerGraph) -> Vec<(usize, usize, Vec<usize>)> {
    let mut pairs = std::collections::BTreeSet::new();
    for q in 0..graph.num_qubits() {
        let es = graph.qubit_edges(q);
        for a in 0..es.len() {
            for b in a + 1..es.len() {
                let (ea, eb) = (graph.edges()[es[a]], graph.edges()[es[b]]);
                if ea.pauli.anticommutes(eb.pauli) {
                    pairs.insert((ea.check.min(eb.check), ea.check.max(eb.check)));
                }
            }
        }
    }
    pairs
        .into_iter()
        .map(|(i, j)| (i, j, code.anticommuting_qubits(i, j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::steane;
    use crate::gf2::BitMatrix;

    fn code(rows: &[&str]) -> StabilizerCode {
        StabilizerCode::new("t", BitMatrix::from_strs(rows)).unwrap()
    }

    #[test]
    fn single_inversion_is_flagged() {
        // XXXX and ZZZZ on the same four qubits
        let c = code(&["11110000", "00001111"]);
        let mut s = Schedule::empty(2, 4);
        for q in 0..4 {
            s.set(0, q, q as i32 + 1);
        }
        // Z check shifted by one tick: X comes first on three of the four qubits
        let z = [2, 3, 4, 1];
        for q in 0..4 {
            s.set(1, q, z[q]);
        }
        let v = validate_schedule(&c, &s);
        assert_eq!(v.len(), 1, "{v:?}");
        match &v[0] {
            Violation::CommutativityParity { first, second, shared, earlier } => {
                assert_eq!((*first, *second), (0, 1));
                assert_eq!(shared, &vec![0, 1, 2, 3]);
                assert_eq!(earlier.len() % 2, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn data_occupation_witness() {
        let c = code(&["1100", "1000"]);
        let mut s = Schedule::empty(2, 2);
        s.set(0, 0, 1);
        s.set(0, 1, 2);
        s.set(1, 0, 1);
        let v = validate_schedule(&c, &s);
        assert_eq!(v, vec![Violation::DataOccupation { qubit: 0, tick: 1, checks: vec![0, 1] }]);
    }

    #[test]
    fn integrality_and_ancilla() {
        let c = code(&["1100"]);
        let mut s = Schedule::empty(1, 2);
        s.set(0, 0, 1);
        let v = validate_schedule(&c, &s);
        assert!(v.iter().any(|x| x.kind() == ViolationKind::Integrality));
        s.set(0, 1, 1);
        let v = validate_schedule(&c, &s);
        assert_eq!(v, vec![Violation::AncillaOccupation { check: 0, tick: 1, qubits: vec![0, 1] }]);

        let mut s = Schedule::empty(1, 2);
        s.set(0, 0, 1);
        s.set(0, 1, 2);
        assert!(validate_schedule(&c, &s).is_empty());
        let c2 = code(&["1000"]);
        assert_eq!(
            validate_schedule(&c2, &s),
            vec![Violation::Integrality { check: 0, qubit: 1, tick: 2 }]
        );
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(lower_bound(&steane()), 6);
        assert_eq!(lower_bound(&code(&["11110000"])), 4);
    }

    #[test]
    fn depth_and_assigned() {
        let mut s = Schedule::empty(2, 3);
        assert_eq!(s.depth(), 0);
        s.set(1, 2, 5);
        s.set(0, 1, 2);
        assert_eq!(s.depth(), 5);
        assert_eq!(s.assigned().collect::<Vec<_>>(), vec![(0, 1, 2), (1, 2, 5)]);
        assert_eq!(s.get(7, 7), -1);
    }
}
