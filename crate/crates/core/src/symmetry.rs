//! Label-preserving automorphisms of the Tanner graph.
//!
//! The schedule search can first look for a schedule that is invariant under a group of
//! automorphisms acting without fixed points. Such a group maps no edge of a node onto another
//! edge of the same node, so giving every edge orbit one tick never violates occupation by
//! itself, and the restricted problem has `|G|` times fewer tick variables.

use std::collections::HashSet;

use crate::code::{Pauli, StabilizerCode};
use crate::tanner::TannerGraph;

/// A permutation of the nodes `0..n` (qubits) followed by `n..n+m` (checks).
pub type Permutation = Vec<u32>;

/// A group of automorphisms in which only the identity fixes a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    n: usize,
    m: usize,
    elements: Vec<Permutation>,
}

const SEARCH_LIMIT: usize = 50_000;
const WORD: usize = 64;

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(WORD)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / WORD] |= 1 << (i % WORD);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / WORD] &= !(1 << (i % WORD));
    }
    fn and(&mut self, o: &Bits) {
        self.0.iter_mut().zip(&o.0).for_each(|(a, b)| *a &= b);
    }
    fn and_not(&mut self, o: &Bits) {
        self.0.iter_mut().zip(&o.0).for_each(|(a, b)| *a &= !b);
    }
    fn has(&self, i: usize) -> bool {
        self.0[i / WORD] >> (i % WORD) & 1 == 1
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                (bits != 0).then(|| {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    wi * WORD + b
                })
            })
        })
    }
}

struct Graph {
    nodes: usize,
    /// `(neighbor, label)` per node.
    adj: Vec<Vec<(usize, Pauli)>>,
    /// Neighbors with a given label, indexed `[node][label]`.
    by_label: Vec<[Bits; 3]>,
    all: Vec<Bits>,
    signature: Vec<(bool, [usize; 3])>,
}

fn label_index(p: Pauli) -> usize {
    match p {
        Pauli::X => 0,
        Pauli::Y => 1,
        Pauli::Z => 2,
    }
}

impl Graph {
    fn new(code: &StabilizerCode) -> Self {
        let (n, m) = (code.n(), code.m());
        let nodes = n + m;
        let mut adj = vec![Vec::new(); nodes];
        for c in 0..m {
            for (q, p) in code.check_support(c) {
                adj[q].push((n + c, p));
                adj[n + c].push((q, p));
            }
        }
        let mut by_label: Vec<[Bits; 3]> =
            (0..nodes).map(|_| [Bits::new(nodes), Bits::new(nodes), Bits::new(nodes)]).collect();
        let mut all: Vec<Bits> = (0..nodes).map(|_| Bits::new(nodes)).collect();
        let mut signature = Vec::with_capacity(nodes);
        for v in 0..nodes {
            let mut counts = [0; 3];
            for &(w, p) in &adj[v] {
                by_label[v][label_index(p)].set(w);
                all[v].set(w);
                counts[label_index(p)] += 1;
            }
            signature.push((v < n, counts));
        }
        Self { nodes, adj, by_label, all, signature }
    }

    /// An automorphism with `from ↦ to` and no fixed node, by backtracking with
    /// neighborhood propagation.
    fn find(&self, from: usize, to: usize, budget: &mut usize) -> Option<Permutation> {
        let mut cand: Vec<Bits> = (0..self.nodes)
            .map(|v| {
                let mut b = Bits::new(self.nodes);
                for w in 0..self.nodes {
                    if w != v && self.signature[w] == self.signature[v] {
                        b.set(w);
                    }
                }
                b
            })
            .collect();
        let mut single = Bits::new(self.nodes);
        single.set(to);
        cand[from] = single;
        let mut map = vec![usize::MAX; self.nodes];
        self.search(&mut cand, &mut map, budget)
    }

    fn search(&self, cand: &mut [Bits], map: &mut [usize], budget: &mut usize) -> Option<Permutation> {
        let next = (0..self.nodes).filter(|&v| map[v] == usize::MAX).min_by_key(|&v| cand[v].count());
        let Some(v) = next else {
            return Some(map.iter().map(|&x| x as u32).collect());
        };
        let options: Vec<usize> = cand[v].ones().collect();
        for img in options {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let mut trial = cand.to_vec();
            if !self.assign(&mut trial, map, v, img) {
                continue;
            }
            map[v] = img;
            if let Some(p) = self.search(&mut trial, map, budget) {
                return Some(p);
            }
            map[v] = usize::MAX;
        }
        None
    }

    fn assign(&self, cand: &mut [Bits], map: &[usize], v: usize, img: usize) -> bool {
        for &(w, p) in &self.adj[v] {
            cand[w].and(&self.by_label[img][label_index(p)]);
        }
        let neighbors = &self.all[v];
        for w in 0..self.nodes {
            if w == v || map[w] != usize::MAX {
                continue;
            }
            cand[w].clear(img);
            if !neighbors.has(w) {
                cand[w].and_not(&self.all[img]);
            }
            if cand[w].count() == 0 {
                return false;
            }
        }
        true
    }
}

fn compose(a: &[u32], b: &[u32]) -> Permutation {
    b.iter().map(|&x| a[x as usize]).collect()
}

/// The group generated by `gens`, or `None` if some element other than the identity fixes a
/// node or the group grows past `limit`.
fn semiregular_closure(gens: &[Permutation], size: usize, limit: usize) -> Option<Vec<Permutation>> {
    let id: Permutation = (0..size as u32).collect();
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut elements = vec![id];
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let p = compose(g, &elements[i]);
            if seen.contains(&p) {
                continue;
            }
            if p.iter().enumerate().any(|(v, &x)| v == x as usize) || elements.len() >= limit {
                return None;
            }
            seen.insert(p.clone());
            elements.push(p);
        }
        i += 1;
    }
    Some(elements)
}

impl SymmetryGroup {
    pub fn trivial(code: &StabilizerCode) -> Self {
        let size = code.n() + code.m();
        Self { n: code.n(), m: code.m(), elements: vec![(0..size as u32).collect()] }
    }

    /// A fixed-point-free automorphism group found greedily: for each qubit outside the
    /// current orbit of qubit 0, look for an automorphism mapping 0 there and keep it if the
    /// enlarged group still fixes no node.
    pub fn find(code: &StabilizerCode) -> Self {
        let mut group = Self::trivial(code);
        let (n, m) = (code.n(), code.m());
        if n == 0 || m == 0 {
            return group;
        }
        let g = Graph::new(code);
        let mut gens: Vec<Permutation> = Vec::new();
        let mut budget = SEARCH_LIMIT;
        for target in 1..n {
            if budget == 0 {
                break;
            }
            if group.elements.iter().any(|p| p[0] as usize == target) {
                continue;
            }
            let mut local = budget.min(4 * (n + m));
            let start = local;
            let found = g.find(0, target, &mut local);
            budget -= start - local;
            let Some(sigma) = found else { continue };
            gens.push(sigma);
            match semiregular_closure(&gens, n + m, n) {
                Some(elements) => group.elements = elements,
                None => {
                    gens.pop();
                }
            }
        }
        group
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    /// Orbit id per Tanner edge: the smallest edge index in its orbit.
    pub fn edge_orbits(&self, graph: &TannerGraph) -> Vec<usize> {
        let n = self.n;
        graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                self.elements
                    .iter()
                    .map(|p| {
                        let c = p[n + edge.check] as usize - n;
                        let q = p[edge.qubit] as usize;
                        graph.edge_index(c, q).expect("automorphisms map edges to edges")
                    })
                    .min()
                    .unwrap_or(e)
            })
            .collect()
    }

    /// Checks that every element preserves the labelled Tanner graph and fixes no node.
    pub fn is_valid_for(&self, code: &StabilizerCode) -> bool {
        let (n, m) = (code.n(), code.m());
        if (self.n, self.m) != (n, m) {
            return false;
        }
        let identity = |p: &Permutation| p.iter().enumerate().all(|(v, &x)| v == x as usize);
        let preserves = |p: &Permutation| {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            identity(&sorted)
                && (0..n).all(|q| (p[q] as usize) < n)
                && (0..m).all(|c| {
                    let img = p[n + c] as usize;
                    img >= n && (0..n).all(|q| code.pauli_at(c, q) == code.pauli_at(img - n, p[q] as usize))
                })
        };
        let fixed_point_free = |p: &Permutation| p.iter().enumerate().all(|(v, &x)| v != x as usize);
        match self.elements.split_first() {
            Some((id, rest)) => {
                identity(id) && rest.iter().all(|p| p.len() == n + m && preserves(p) && fixed_point_free(p))
            }
            None => false,
        }
    }
}
