//! CNF encoding of "a valid schedule of depth at most `T_max` exists".

use std::collections::{HashMap, HashSet};

use super::{anticommuting_pairs, Schedule};
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::sat::{Model, SatProblem, VarId};
use crate::symmetry::SymmetryGroup;
use crate::tanner::TannerGraph;

/// An encoded problem and the variables needed to decode its models.
#[derive(Clone, Debug)]
pub struct Encoding {
    pub problem: SatProblem,
    pub graph: TannerGraph,
    pub t_max: usize,
    /// `assign[e][k - 1]` is true iff edge `e` runs at tick `k`.
    pub assign: Vec<Vec<VarId>>,
    /// Number of order variables, one per (check pair, shared anticommuting qubit).
    pub order_vars: usize,
}

/// Builds the scheduling problem for depth `≤ t_max`.
///
/// Only Tanner edges get tick variables: `A[e][k]` (edge `e` runs at tick `k`) and the order
/// encoding `P[e][k] ⇔ tick(e) ≤ k`, channelled so that each edge takes exactly one tick.
/// Each data qubit and each check take part in at most one gate per tick; a node whose degree
/// equals `t_max` must use every tick. For every check pair `(i, j)` with anticommuting shared
/// qubits `L`, an order variable per `l ∈ L` states that `(i, l)` runs before `(j, l)`, and the
/// order variables must have even parity.
pub fn encode(code: &StabilizerCode, t_max: usize) -> Result<Encoding> {
    let graph = TannerGraph::from_code(code);
    let classes: Vec<usize> = (0..graph.edges().len()).collect();
    build(code, graph, t_max, &classes)
}

/// Like [`encode`], restricted to schedules constant on the edge orbits of `group`.
///
/// A model is a valid schedule of the full problem; unsatisfiability says nothing about it.
pub fn encode_symmetric(code: &StabilizerCode, t_max: usize, group: &SymmetryGroup) -> Result<Encoding> {
    let graph = TannerGraph::from_code(code);
    let classes = group.edge_orbits(&graph);
    build(code, graph, t_max, &classes)
}

fn build(code: &StabilizerCode, graph: TannerGraph, t_max: usize, classes: &[usize]) -> Result<Encoding> {
    if t_max == 0 {
        return Err(Error::InvalidParameter("T_max must be at least 1".into()));
    }
    let mut p = SatProblem::new();
    let mut assign: Vec<Vec<VarId>> = vec![Vec::new(); classes.len()];
    let mut prefix: Vec<Vec<VarId>> = vec![Vec::new(); classes.len()];
    for (e, edge) in graph.edges().iter().enumerate() {
        if classes[e] != e {
            continue;
        }
        assign[e] = (1..=t_max).map(|k| p.new_var(format!("A[{}][{}][{k}]", edge.check, edge.qubit))).collect();
        prefix[e] = (1..t_max).map(|k| p.new_var(format!("P[{}][{}][{k}]", edge.check, edge.qubit))).collect();
    }
    for e in 0..classes.len() {
        if classes[e] != e {
            assign[e] = assign[classes[e]].clone();
            prefix[e] = prefix[classes[e]].clone();
        }
    }

    for e in (0..classes.len()).filter(|&e| classes[e] == e) {
        let (a, pre) = (&assign[e], &prefix[e]);
        p.add_clause(&a.iter().map(|v| v.pos()).collect::<Vec<_>>())?;
        for k in 1..=t_max {
            // A[k] ⇔ P[k] ∧ ¬P[k-1], where P[0] is false and P[t_max] is true
            let ak = a[k - 1];
            let upper = (k < t_max).then(|| pre[k - 1]);
            let lower = (k > 1).then(|| pre[k - 2]);
            let mut define = vec![ak.pos()];
            if let Some(u) = upper {
                p.add_clause(&[ak.neg(), u.pos()])?;
                define.push(u.neg());
            }
            if let Some(l) = lower {
                p.add_clause(&[ak.neg(), l.neg()])?;
                define.push(l.pos());
            }
            if let (Some(u), Some(l)) = (upper, lower) {
                p.add_clause(&[l.neg(), u.pos()])?;
            }
            p.add_clause(&define)?;
        }
    }

    let mut seen: HashSet<Vec<VarId>> = HashSet::new();
    for k in 0..t_max {
        let groups = (0..graph.num_qubits())
            .map(|q| graph.qubit_edges(q))
            .chain((0..graph.num_checks()).map(|c| graph.check_edges(c)));
        for edges in groups {
            let mut vars: Vec<VarId> = edges.iter().map(|&e| assign[e][k]).collect();
            vars.sort_unstable();
            if !seen.insert(vars.clone()) {
                continue;
            }
            p.add_at_most_one(&vars)?;
            if vars.len() == t_max {
                p.add_clause(&vars.iter().map(|v| v.pos()).collect::<Vec<_>>())?;
            }
        }
    }

    let mut order_vars = 0;
    let mut orders_of: HashMap<(usize, usize), VarId> = HashMap::new();
    let mut parities: HashSet<Vec<VarId>> = HashSet::new();
    for (i, j, shared) in anticommuting_pairs(code, &graph) {
        let mut orders: Vec<VarId> = Vec::with_capacity(shared.len());
        for l in shared {
            let ei = graph.edge_index(i, l).expect("anticommuting qubit lies in both supports");
            let ej = graph.edge_index(j, l).expect("anticommuting qubit lies in both supports");
            let key = (classes[ei], classes[ej]);
            let o = match orders_of.get(&key) {
                Some(&o) => o,
                None => {
                    let o = p.new_var(format!("O[{i}][{j}][{l}]"));
                    order_vars += 1;
                    define_order(&mut p, o, &prefix[ei], &prefix[ej], t_max)?;
                    orders_of.insert(key, o);
                    o
                }
            };
            // a repeated variable cancels in the parity
            match orders.iter().position(|&x| x == o) {
                Some(pos) => {
                    orders.swap_remove(pos);
                }
                None => orders.push(o),
            }
        }
        orders.sort_unstable();
        if parities.insert(orders.clone()) {
            p.add_xor_even(&orders)?;
        }
    }

    Ok(Encoding { problem: p, graph, t_max, assign, order_vars })
}

/// `o ⇔ tick(first) < tick(second)` for two edges on one qubit, which never share a tick.
fn define_order(p: &mut SatProblem, o: VarId, first: &[VarId], second: &[VarId], t_max: usize) -> Result<()> {
    for k in 1..=t_max {
        let before = |pre: &[VarId]| (k > 1).then(|| pre[k - 2]);
        let at_most = |pre: &[VarId]| (k < t_max).then(|| pre[k - 1]);
        for (a, b, sign) in [(first, second, false), (second, first, true)] {
            // sign=false: o ∧ tick(b) ≤ k → tick(a) ≤ k-1
            let mut c = vec![o.lit(sign)];
            if let Some(v) = at_most(b) {
                c.push(v.neg());
            }
            if let Some(v) = before(a) {
                c.push(v.pos());
            }
            p.add_clause(&c)?;
        }
    }
    Ok(())
}

impl Encoding {
    /// Reads the tick of every edge from a model of the problem.
    pub fn decode(&self, model: &Model) -> Result<Schedule> {
        let mut ticks = Vec::with_capacity(self.assign.len());
        for (e, vars) in self.assign.iter().enumerate() {
            let on: Vec<usize> = (0..vars.len()).filter(|&k| model.value(vars[k])).collect();
            match on.as_slice() {
                [k] => ticks.push(*k as u32 + 1),
                _ => {
                    return Err(Error::Internal(format!(
                        "model assigns {} ticks to edge {e}",
                        on.len()
                    )))
                }
            }
        }
        Ok(Schedule::from_edge_ticks(&self.graph, &ticks))
    }

    /// Number of distinct tick variables, `|edges| · T_max` without symmetry.
    pub fn assign_vars(&self) -> usize {
        let distinct: HashSet<VarId> = self.assign.iter().flatten().copied().collect();
        distinct.len()
    }

    /// A copy of the problem with unit clauses pinning every edge to its tick in `s`.
    pub fn with_fixed_schedule(&self, s: &Schedule) -> Result<SatProblem> {
        let mut p = self.problem.clone();
        for (e, vars) in self.assign.iter().enumerate() {
            let edge = self.graph.edges()[e];
            let t = s.get(edge.check, edge.qubit);
            for (k, v) in vars.iter().enumerate() {
                p.add_clause(&[v.lit(t == k as i32 + 1)])?;
            }
        }
        Ok(p)
    }
}
