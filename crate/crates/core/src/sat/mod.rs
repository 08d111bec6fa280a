//! Propositional problems and a pluggable solving interface.
//!
//! A [`SatProblem`] is a CNF formula with a tag per variable. It offers the
//! cardinality and parity gadgets the scheduler needs and hands the finished
//! formula to a [`Backend`]: the embedded CDCL solver by default, or an
//! external DIMACS solver process.

mod cdcl;
mod dimacs;

pub use cdcl::Cdcl;
pub use dimacs::{parse_solver_output, to_dimacs, DimacsProcess};

use std::fmt;
use std::sync::atomic::AtomicBool;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::error::{Error, Result};

/// Pairwise at-most-one up to this many variables; ladder encoding above.
pub const PAIRWISE_LIMIT: usize = 6;

/// A variable, numbered from 1 in allocation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(u32);

impl VarId {
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }

    pub fn lit(self, value: bool) -> Lit {
        if value {
            self.pos()
        } else {
            self.neg()
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal in DIMACS convention: `v` or `-v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(x: i32) -> Self {
        assert_ne!(x, 0, "0 is not a literal");
        Lit(x)
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> VarId {
        VarId(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

/// Truth value per variable; index 0 is unused so that `model[v.index()]` works.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model(Vec<bool>);

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Model(values)
    }

    pub fn value(&self, v: VarId) -> bool {
        self.0[v.0 as usize]
    }

    pub fn lit_value(&self, l: Lit) -> bool {
        self.value(l.var()) == l.is_positive()
    }

    pub fn num_vars(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(Model),
    Unsat,
    Timeout,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Timeout => "timeout",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    pub wall_time: Duration,
    pub backend: String,
    pub seed: u64,
}

impl SolveOutcome {
    pub fn model(&self) -> Option<&Model> {
        match &self.verdict {
            Verdict::Sat(m) => Some(m),
            _ => None,
        }
    }
}

/// A solver that decides a finished problem.
pub trait Backend: Send + Sync {
    fn name(&self) -> String;

    /// Must return `Unsat` only when the formula is proven unsatisfiable, and `Timeout` when the
    /// budget runs out or `cancel` is raised.
    fn decide(
        &self,
        problem: &SatProblem,
        timeout: Duration,
        seed: u64,
        cancel: Option<&AtomicBool>,
    ) -> Result<Verdict>;
}

/// Backend selection as written on the command line: `embedded` or `dimacs:<path>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendSpec {
    Embedded,
    Dimacs(String),
}

impl BackendSpec {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "embedded" => Ok(BackendSpec::Embedded),
            _ => match s.strip_prefix("dimacs:") {
                Some(path) if !path.is_empty() => Ok(BackendSpec::Dimacs(path.to_string())),
                _ => Err(Error::InvalidParameter(format!(
                    "unknown backend {s:?}; expected embedded or dimacs:<path>"
                ))),
            },
        }
    }

    pub fn build(&self) -> Box<dyn Backend> {
        match self {
            BackendSpec::Embedded => Box::new(Cdcl::default()),
            BackendSpec::Dimacs(path) => Box::new(DimacsProcess::new(path.clone())),
        }
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendSpec::Embedded => f.write_str("embedded"),
            BackendSpec::Dimacs(p) => write!(f, "dimacs:{p}"),
        }
    }
}

/// A CNF formula with per-variable tags.
#[derive(Clone, Debug, Default)]
pub struct SatProblem {
    tags: Vec<String>,
    clauses: Vec<Vec<Lit>>,
}

impl SatProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_var(&mut self, tag: impl Into<String>) -> VarId {
        self.tags.push(tag.into());
        VarId(self.tags.len() as u32)
    }

    pub fn num_vars(&self) -> usize {
        self.tags.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn tag(&self, v: VarId) -> Option<&str> {
        self.tags.get((v.0 as usize).wrapping_sub(1)).map(String::as_str)
    }

    fn check_lit(&self, l: Lit) -> Result<()> {
        let v = l.var().0 as usize;
        if v == 0 || v > self.tags.len() {
            return Err(Error::InvalidParameter(format!("literal {} references an unallocated variable", l.0)));
        }
        Ok(())
    }

    pub fn add_clause(&mut self, lits: &[Lit]) -> Result<()> {
        if lits.is_empty() {
            return Err(Error::InvalidParameter("empty clause".into()));
        }
        for &l in lits {
            self.check_lit(l)?;
        }
        self.clauses.push(lits.to_vec());
        Ok(())
    }

    fn distinct(&self, vars: &[VarId]) -> Result<()> {
        let mut sorted: Vec<u32> = vars.iter().map(|v| v.0).collect();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVar(w[0]));
        }
        for v in vars {
            self.check_lit(v.pos())?;
        }
        Ok(())
    }

    /// `Σ vars ≤ 1`: pairwise for up to [`PAIRWISE_LIMIT`] variables, sequential ladder otherwise.
    pub fn add_at_most_one(&mut self, vars: &[VarId]) -> Result<()> {
        self.distinct(vars)?;
        if vars.len() <= 1 {
            return Ok(());
        }
        if vars.len() <= PAIRWISE_LIMIT {
            for i in 0..vars.len() {
                for j in i + 1..vars.len() {
                    self.clauses.push(vec![vars[i].neg(), vars[j].neg()]);
                }
            }
            return Ok(());
        }
        // s_i ⇔ "some of vars[0..=i] is true"
        let n = vars.len();
        let s: Vec<VarId> = (0..n - 1).map(|i| self.new_var(format!("amo.s{i}"))).collect();
        self.clauses.push(vec![vars[0].neg(), s[0].pos()]);
        for i in 1..n - 1 {
            self.clauses.push(vec![vars[i].neg(), s[i].pos()]);
            self.clauses.push(vec![s[i - 1].neg(), s[i].pos()]);
            self.clauses.push(vec![vars[i].neg(), s[i - 1].neg()]);
        }
        self.clauses.push(vec![vars[n - 1].neg(), s[n - 2].neg()]);
        Ok(())
    }

    /// `Σ vars = 1`.
    pub fn add_exactly_one(&mut self, vars: &[VarId]) -> Result<()> {
        if vars.is_empty() {
            return Err(Error::EmptyExactlyOne);
        }
        self.add_at_most_one(vars)?;
        self.clauses.push(vars.iter().map(|v| v.pos()).collect());
        Ok(())
    }

    /// `⊕ vars = 0`, chained through auxiliary partial parities.
    pub fn add_xor_even(&mut self, vars: &[VarId]) -> Result<()> {
        for v in vars {
            self.check_lit(v.pos())?;
        }
        match vars {
            [] => {}
            [a] => self.clauses.push(vec![a.neg()]),
            [first, middle @ .., last] => {
                let mut acc = first.pos();
                for &v in middle {
                    let t = self.new_var("xor.t");
                    self.add_xor3(t.pos(), acc, v.pos());
                    acc = t.pos();
                }
                // acc ⇔ last
                self.clauses.push(vec![!acc, last.pos()]);
                self.clauses.push(vec![acc, last.neg()]);
            }
        }
        Ok(())
    }

    /// `out ⇔ a ⊕ b`.
    fn add_xor3(&mut self, out: Lit, a: Lit, b: Lit) {
        self.clauses.push(vec![!out, a, b]);
        self.clauses.push(vec![!out, !a, !b]);
        self.clauses.push(vec![out, !a, b]);
        self.clauses.push(vec![out, a, !b]);
    }

    /// True if every clause has a true literal under `model`.
    pub fn check_model(&self, model: &Model) -> bool {
        model.num_vars() >= self.num_vars()
            && self.clauses.iter().all(|c| c.iter().any(|&l| model.lit_value(l)))
    }

    /// Solves with the embedded CDCL backend.
    pub fn solve(&self, timeout: Duration, seed: u64) -> Result<SolveOutcome> {
        self.solve_with(&Cdcl::default(), timeout, seed, None)
    }

    /// Solves with any backend and verifies a returned model against every clause.
    pub fn solve_with(
        &self,
        backend: &dyn Backend,
        timeout: Duration,
        seed: u64,
        cancel: Option<&AtomicBool>,
    ) -> Result<SolveOutcome> {
        let start = Instant::now();
        let verdict = backend.decide(self, timeout, seed, cancel)?;
        if let Verdict::Sat(model) = &verdict {
            if !self.check_model(model) {
                return Err(Error::Backend(format!(
                    "{} returned a model that violates the formula",
                    backend.name()
                )));
            }
        }
        Ok(SolveOutcome { verdict, wall_time: start.elapsed(), backend: backend.name(), seed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every assignment of the first `k` variables that extends to a model of the CNF. The
    /// extension is found by a plain DPLL over the auxiliaries, independent of the CDCL backend.
    fn projected_models(p: &SatProblem, k: usize) -> Vec<u32> {
        (0u32..(1 << k))
            .filter(|&mask| {
                let mut vals: Vec<Option<bool>> = vec![None; p.num_vars() + 1];
                for i in 0..k {
                    vals[i + 1] = Some(mask >> i & 1 == 1);
                }
                dpll(p, &mut vals)
            })
            .collect()
    }

    fn dpll(p: &SatProblem, vals: &mut Vec<Option<bool>>) -> bool {
        let mut free = None;
        for c in p.clauses() {
            let mut satisfied = false;
            let mut open = None;
            for &l in c {
                match vals[l.var().index() as usize] {
                    Some(v) if v == l.is_positive() => satisfied = true,
                    Some(_) => {}
                    None => open = Some(l.var()),
                }
            }
            if !satisfied {
                match open {
                    None => return false,
                    Some(v) => free = free.or(Some(v)),
                }
            }
        }
        let Some(v) = free else { return true };
        for value in [false, true] {
            vals[v.index() as usize] = Some(value);
            if dpll(p, vals) {
                return true;
            }
        }
        vals[v.index() as usize] = None;
        false
    }

    fn vars(p: &mut SatProblem, n: usize) -> Vec<VarId> {
        (0..n).map(|i| p.new_var(format!("x{i}"))).collect()
    }

    #[test]
    fn new_var_ids_and_tags() {
        let mut p = SatProblem::new();
        let a = p.new_var("first");
        assert_eq!(a.index(), 1);
        let more: Vec<_> = (0..5).map(|i| p.new_var(format!("v{i}"))).collect();
        let mut ids: Vec<u32> = more.iter().map(|v| v.index()).collect();
        ids.dedup();
        assert_eq!(ids.len(), 5);
        assert_eq!(p.tag(a), Some("first"));
        assert_eq!(p.tag(more[4]), Some("v4"));
    }

    #[test]
    fn amo_small_cases() {
        let mut p = SatProblem::new();
        let v = vars(&mut p, 2);
        p.add_at_most_one(&v).unwrap();
        assert_eq!(p.clauses(), &[vec![v[0].neg(), v[1].neg()]]);

        let mut p = SatProblem::new();
        let v = vars(&mut p, 1);
        p.add_at_most_one(&v).unwrap();
        assert!(p.clauses().is_empty());

        let mut p = SatProblem::new();
        let v = vars(&mut p, 2);
        assert!(matches!(p.add_at_most_one(&[v[0], v[0]]), Err(Error::DuplicateVar(1))));
    }

    #[test]
    fn amo_ladder_exhaustive() {
        let mut p = SatProblem::new();
        let v = vars(&mut p, 10);
        p.add_at_most_one(&v).unwrap();
        assert!(p.num_vars() > 10, "ladder allocates auxiliaries");
        let models = projected_models(&p, 10);
        let expected: Vec<u32> = (0u32..1024).filter(|m| m.count_ones() <= 1).collect();
        assert_eq!(models, expected);
    }

    #[test]
    fn exactly_one_cases() {
        let mut p = SatProblem::new();
        let v = vars(&mut p, 1);
        p.add_exactly_one(&v).unwrap();
        assert_eq!(projected_models(&p, 1), vec![1]);

        let mut p = SatProblem::new();
        let v = vars(&mut p, 3);
        p.add_exactly_one(&v).unwrap();
        assert_eq!(projected_models(&p, 3), vec![1, 2, 4]);

        let mut p = SatProblem::new();
        assert!(matches!(p.add_exactly_one(&[]), Err(Error::EmptyExactlyOne)));
    }

    #[test]
    fn xor_cases() {
        let mut p = SatProblem::new();
        p.add_xor_even(&[]).unwrap();
        assert_eq!(p.num_clauses(), 0);

        let mut p = SatProblem::new();
        let v = vars(&mut p, 2);
        p.add_xor_even(&v).unwrap();
        assert_eq!(projected_models(&p, 2), vec![0, 3]);

        let mut p = SatProblem::new();
        let v = vars(&mut p, 4);
        p.add_xor_even(&v).unwrap();
        let models = projected_models(&p, 4);
        assert_eq!(models.len(), 8);
        assert!(models.iter().all(|m| m.count_ones() % 2 == 0));
    }

    #[test]
    fn encodings_equal_predicates_up_to_twelve() {
        for n in 1..=12usize {
            let mut p = SatProblem::new();
            let v = vars(&mut p, n);
            p.add_at_most_one(&v).unwrap();
            let got = projected_models(&p, n);
            let want: Vec<u32> = (0u32..(1 << n)).filter(|m| m.count_ones() <= 1).collect();
            assert_eq!(got, want, "amo n={n}");

            let mut p = SatProblem::new();
            let v = vars(&mut p, n);
            p.add_exactly_one(&v).unwrap();
            let got = projected_models(&p, n);
            let want: Vec<u32> = (0u32..(1 << n)).filter(|m| m.count_ones() == 1).collect();
            assert_eq!(got, want, "eo n={n}");

            let mut p = SatProblem::new();
            let v = vars(&mut p, n);
            p.add_xor_even(&v).unwrap();
            let got = projected_models(&p, n);
            let want: Vec<u32> = (0u32..(1 << n)).filter(|m| m.count_ones() % 2 == 0).collect();
            assert_eq!(got, want, "xor n={n}");
        }
    }

    #[test]
    fn solve_trivial() {
        let mut p = SatProblem::new();
        let a = p.new_var("a");
        p.add_clause(&[a.pos()]).unwrap();
        let out = p.solve(Duration::from_secs(5), 1).unwrap();
        assert!(out.model().unwrap().value(a));

        p.add_clause(&[a.neg()]).unwrap();
        let out = p.solve(Duration::from_secs(5), 1).unwrap();
        assert_eq!(out.verdict, Verdict::Unsat);
        assert_eq!(out.backend, "embedded");
    }

    #[test]
    fn rejects_bad_clauses() {
        let mut p = SatProblem::new();
        assert!(p.add_clause(&[]).is_err());
        assert!(p.add_clause(&[Lit::from_dimacs(3)]).is_err());
    }

    #[test]
    fn backend_spec_parse() {
        assert_eq!(BackendSpec::parse("embedded").unwrap(), BackendSpec::Embedded);
        assert_eq!(
            BackendSpec::parse("dimacs:/usr/bin/kissat").unwrap(),
            BackendSpec::Dimacs("/usr/bin/kissat".into())
        );
        assert!(BackendSpec::parse("dimacs:").is_err());
        assert!(BackendSpec::parse("cpsat").is_err());
    }
}
