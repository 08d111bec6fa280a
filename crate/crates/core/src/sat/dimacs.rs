//! DIMACS CNF export and an external-solver backend.
//!
//! The external solver is run as `<path> <file.cnf>` and must print the usual
//! competition output: an `s SATISFIABLE` / `s UNSATISFIABLE` line and, when
//! satisfiable, `v` lines terminated by `0`.

use std::fmt::Write as _;
use std::sync::atomic::AtomicBool;
use std::time::Duration;

use super::{Backend, Model, SatProblem, Verdict};
use crate::error::{Error, Result};

pub fn to_dimacs(problem: &SatProblem) -> String {
    let mut out = format!("p cnf {} {}\n", problem.num_vars(), problem.num_clauses());
    for c in problem.clauses() {
        for l in c {
            let _ = write!(out, "{} ", l.dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Parses solver stdout. `None` for `s UNKNOWN` or no status line at all.
pub fn parse_solver_output(text: &str, num_vars: usize) -> Result<Option<Verdict>> {
    let mut status = None;
    let mut values = vec![false; num_vars + 1];
    for line in text.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(s.trim().to_string());
        } else if let Some(v) = line.strip_prefix("v ") {
            for tok in v.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| Error::Backend(format!("bad value token {tok:?} in solver output")))?;
                if x == 0 {
                    continue;
                }
                let idx = x.unsigned_abs() as usize;
                if idx > num_vars {
                    return Err(Error::Backend(format!("solver assigned unknown variable {idx}")));
                }
                values[idx] = x > 0;
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => Ok(Some(Verdict::Sat(Model::new(values)))),
        Some("UNSATISFIABLE") => Ok(Some(Verdict::Unsat)),
        Some("UNKNOWN") | None => Ok(None),
        Some(other) => Err(Error::Backend(format!("unrecognised status line {other:?}"))),
    }
}

/// Runs an external DIMACS solver binary.
#[derive(Clone, Debug)]
pub struct DimacsProcess {
    path: String,
}

impl DimacsProcess {
    pub fn new(path: impl Into<String>) -> Self {
        Self { path: path.into() }
    }
}

#[cfg(not(target_arch = "wasm32"))]
impl Backend for DimacsProcess {
    fn name(&self) -> String {
        format!("dimacs:{}", self.path)
    }

    fn decide(
        &self,
        problem: &SatProblem,
        timeout: Duration,
        _seed: u64,
        cancel: Option<&AtomicBool>,
    ) -> Result<Verdict> {
        use std::io::Read;
        use std::process::{Command, Stdio};
        use std::sync::atomic::Ordering;
        use web_time::Instant;

        let file = std::env::temp_dir().join(format!(
            "qsched-{}-{}.cnf",
            std::process::id(),
            Instant::now().elapsed().as_nanos() ^ (problem.num_clauses() as u128)
        ));
        std::fs::write(&file, to_dimacs(problem))?;
        let mut child = Command::new(&self.path)
            .arg(&file)
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| Error::Backend(format!("cannot start {}: {e}", self.path)))?;

        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = stdout.read_to_string(&mut s);
            s
        });
        let start = Instant::now();
        let finished = loop {
            if child.try_wait()?.is_some() {
                break true;
            }
            if start.elapsed() >= timeout || cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
                let _ = child.kill();
                let _ = child.wait();
                break false;
            }
            std::thread::sleep(Duration::from_millis(5));
        };
        let text = reader.join().unwrap_or_default();
        let _ = std::fs::remove_file(&file);
        if !finished {
            return Ok(Verdict::Timeout);
        }
        Ok(parse_solver_output(&text, problem.num_vars())?.unwrap_or(Verdict::Timeout))
    }
}

#[cfg(target_arch = "wasm32")]
impl Backend for DimacsProcess {
    fn name(&self) -> String {
        format!("dimacs:{}", self.path)
    }

    fn decide(&self, _: &SatProblem, _: Duration, _: u64, _: Option<&AtomicBool>) -> Result<Verdict> {
        Err(Error::Backend("external solvers are unavailable on this target".into()))
    }
}
