//! Check–qubit Tanner graph with Pauli-labelled edges.

use std::fmt::Write as _;

use crate::code::{Pauli, StabilizerCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub check: usize,
    pub qubit: usize,
    pub pauli: Pauli,
}

#[derive(Clone, Debug)]
pub struct TannerGraph {
    checks: usize,
    qubits: usize,
    edges: Vec<Edge>,
    check_edges: Vec<Vec<usize>>,
    qubit_edges: Vec<Vec<usize>>,
}

impl TannerGraph {
    /// One edge per `(check, qubit)` with a nonzero X or Z bit; edges are ordered by check, then qubit.
    pub fn from_code(code: &StabilizerCode) -> Self {
        let mut edges = Vec::new();
        let mut check_edges = vec![Vec::new(); code.m()];
        let mut qubit_edges = vec![Vec::new(); code.n()];
        for check in 0..code.m() {
            for (qubit, pauli) in code.check_support(check) {
                check_edges[check].push(edges.len());
                qubit_edges[qubit].push(edges.len());
                edges.push(Edge { check, qubit, pauli });
            }
        }
        Self { checks: code.m(), qubits: code.n(), edges, check_edges, qubit_edges }
    }

    pub fn num_checks(&self) -> usize {
        self.checks
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn check_edges(&self, check: usize) -> &[usize] {
        &self.check_edges[check]
    }

    pub fn qubit_edges(&self, qubit: usize) -> &[usize] {
        &self.qubit_edges[qubit]
    }

    /// Edge index for `(check, qubit)`, if they are adjacent.
    pub fn edge_index(&self, check: usize, qubit: usize) -> Option<usize> {
        self.check_edges[check].iter().copied().find(|&e| self.edges[e].qubit == qubit)
    }

    /// Maximum number of incident edges over all check and qubit nodes.
    pub fn max_degree(&self) -> usize {
        self.degree_of(&(0..self.edges.len()).collect::<Vec<_>>())
    }

    /// Indices of edges carrying the given label.
    pub fn edges_with_label(&self, pauli: Pauli) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].pauli == pauli).collect()
    }

    /// Maximum degree of the subgraph spanned by `edges`.
    pub fn degree_of(&self, edges: &[usize]) -> usize {
        let mut deg = vec![0usize; self.checks + self.qubits];
        for &e in edges {
            deg[self.edges[e].check] += 1;
            deg[self.checks + self.edges[e].qubit] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Proper edge colouring of the subgraph spanned by `edges` with exactly its maximum degree
    /// many colours (König). Uses alternating-path recolouring.
    pub fn bipartite_edge_coloring(&self, edges: &[usize]) -> EdgeColoring {
        let delta = self.degree_of(edges);
        let nodes = self.checks + self.qubits;
        // at[node][color] = edge currently holding that colour at the node
        let mut at: Vec<Vec<Option<usize>>> = vec![vec![None; delta]; nodes];
        let mut color: Vec<Option<usize>> = vec![None; self.edges.len()];
        let ends = |e: usize| (self.edges[e].check, self.checks + self.edges[e].qubit);

        for &e in edges {
            let (u, v) = ends(e);
            let free = |node: usize, at: &Vec<Vec<Option<usize>>>| {
                (0..delta).find(|&c| at[node][c].is_none()).expect("degree bound leaves a free colour")
            };
            let a = free(u, &at);
            if at[v][a].is_some() {
                let b = free(v, &at);
                // swap a/b along the alternating path starting at v; it cannot reach u
                let mut path = Vec::new();
                let mut node = v;
                let mut want = a;
                while let Some(pe) = at[node][want] {
                    path.push(pe);
                    let (x, y) = ends(pe);
                    node = if x == node { y } else { x };
                    want = if want == a { b } else { a };
                }
                for &pe in &path {
                    let (x, y) = ends(pe);
                    let c = color[pe].unwrap();
                    at[x][c] = None;
                    at[y][c] = None;
                }
                for &pe in &path {
                    let (x, y) = ends(pe);
                    let c = if color[pe] == Some(a) { b } else { a };
                    color[pe] = Some(c);
                    at[x][c] = Some(pe);
                    at[y][c] = Some(pe);
                }
            }
            debug_assert!(at[u][a].is_none() && at[v][a].is_none());
            color[e] = Some(a);
            at[u][a] = Some(e);
            at[v][a] = Some(e);
        }
        EdgeColoring {
            colors: edges.iter().map(|&e| (e, color[e].unwrap())).collect(),
            num_colors: delta,
        }
    }

    /// Graphviz rendering, for debugging.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph tanner {\n");
        for e in &self.edges {
            let _ = writeln!(out, "  c{} -- q{} [label={}];", e.check, e.qubit, e.pauli);
        }
        out.push_str("}\n");
        out
    }
}

/// Colour per edge, `0 ≤ colour < num_colors`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    /// `(edge index, colour)` in the order the edges were given.
    pub colors: Vec<(usize, usize)>,
    pub num_colors: usize,
}

impl EdgeColoring {
    /// True if no two edges sharing an endpoint share a colour.
    pub fn is_proper(&self, graph: &TannerGraph) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.colors.iter().all(|&(e, c)| {
            let edge = graph.edges()[e];
            c < self.num_colors
                && seen.insert((0u8, edge.check, c))
                && seen.insert((1u8, edge.qubit, c))
        })
    }

    pub fn colors_used(&self) -> usize {
        let mut cs: Vec<usize> = self.colors.iter().map(|&(_, c)| c).collect();
        cs.sort_unstable();
        cs.dedup();
        cs.len()
    }
}
