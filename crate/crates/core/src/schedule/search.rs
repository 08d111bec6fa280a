//! Iterated depth search for the shallowest valid schedule.

use std::sync::atomic::AtomicBool;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use web_time::Instant;

use super::encode::encode_symmetric;
use super::{asap_schedule, coloration_schedule, encode, validate_schedule, Schedule, Status};
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::sat::{Backend, Cdcl, Verdict};
use crate::symmetry::SymmetryGroup;
use crate::tanner::TannerGraph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthRecord {
    pub t_max: usize,
    /// `sat`, `unsat`, `timeout` or `skipped` (overall budget exhausted).
    pub verdict: String,
    pub wall_seconds: f64,
    pub seed: u64,
    /// The schedule came from the symmetry-restricted problem.
    #[serde(default)]
    pub restricted: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DepthSearchLog {
    pub records: Vec<DepthRecord>,
}

impl DepthSearchLog {
    fn verdict_at(&self, t_max: usize) -> Option<&str> {
        self.records.iter().find(|r| r.t_max == t_max).map(|r| r.verdict.as_str())
    }
}

pub struct SearchOptions<'a> {
    pub per_depth_timeout: Duration,
    /// Total wall-clock budget over all depths; `None` for no limit beyond the per-depth one.
    pub budget: Option<Duration>,
    pub seed: u64,
    pub backend: &'a dyn Backend,
    pub cancel: Option<&'a AtomicBool>,
    /// Depths tried are `Δ ..= max_depth_factor · Δ`.
    pub max_depth_factor: usize,
    /// Try a schedule invariant under the code's automorphisms before the full problem.
    pub symmetry: bool,
}

impl<'a> SearchOptions<'a> {
    pub fn new(per_depth_timeout: Duration, seed: u64, backend: &'a dyn Backend) -> Self {
        Self { per_depth_timeout, budget: None, seed, backend, cancel: None, max_depth_factor: 2, symmetry: true }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub schedule: Option<Schedule>,
    pub status: Status,
    pub log: DepthSearchLog,
}

static EMBEDDED: std::sync::OnceLock<Cdcl> = std::sync::OnceLock::new();

/// The default embedded backend, for callers that do not care.
pub fn embedded() -> &'static Cdcl {
    EMBEDDED.get_or_init(Cdcl::default)
}

/// Tries `T_max = Δ, Δ+1, …, 2Δ` with a fresh encoding each time and returns the first
/// satisfiable depth.
///
/// A result is `Optimal` when it sits at the degree lower bound or the depth just below was
/// proven unsatisfiable, and `NearOptimal` when some smaller depth timed out. Depths that
/// time out are skipped. If no depth succeeds the schedule is `None` and the status `Fallback`.
pub fn solve_optimal(code: &StabilizerCode, opts: &SearchOptions<'_>) -> Result<SearchResult> {
    let graph = TannerGraph::from_code(code);
    let delta = graph.max_degree();
    let mut log = DepthSearchLog::default();
    if code.m() == 0 {
        return Ok(SearchResult {
            schedule: Some(Schedule::empty(0, code.n())),
            status: Status::Optimal,
            log,
        });
    }
    let start = Instant::now();
    let group = if opts.symmetry { SymmetryGroup::find(code) } else { SymmetryGroup::trivial(code) };
    for t_max in delta..=opts.max_depth_factor.max(1) * delta {
        let mut timeout = opts.per_depth_timeout;
        if let Some(budget) = opts.budget {
            let left = budget.saturating_sub(start.elapsed());
            if left.is_zero() {
                log.records.push(DepthRecord {
                    t_max,
                    verdict: "skipped".into(),
                    wall_seconds: 0.0,
                    seed: opts.seed,
                    restricted: false,
                });
                continue;
            }
            timeout = timeout.min(left);
        }
        let depth_start = Instant::now();
        let mut found = None;
        if !group.is_trivial() {
            let enc = encode_symmetric(code, t_max, &group)?;
            let out = enc.problem.solve_with(opts.backend, timeout / 2, opts.seed, opts.cancel)?;
            if let Verdict::Sat(model) = &out.verdict {
                found = Some((enc.decode(model)?, true));
            }
        }
        let verdict = match found {
            Some(_) => "sat",
            None => {
                let enc = encode(code, t_max)?;
                let left = timeout.saturating_sub(depth_start.elapsed());
                let out = enc.problem.solve_with(opts.backend, left, opts.seed, opts.cancel)?;
                if let Verdict::Sat(model) = &out.verdict {
                    found = Some((enc.decode(model)?, false));
                }
                out.verdict.label()
            }
        };
        log.records.push(DepthRecord {
            t_max,
            verdict: verdict.into(),
            wall_seconds: depth_start.elapsed().as_secs_f64(),
            seed: opts.seed,
            restricted: found.as_ref().is_some_and(|f| f.1),
        });
        if let Some((schedule, _)) = found {
            let violations = validate_schedule(code, &schedule);
            if !violations.is_empty() {
                return Err(Error::Internal(format!(
                    "decoded schedule at T_max={t_max} violates constraints: {}",
                    violations[0]
                )));
            }
            let d = schedule.depth();
            let proven = d == delta || (d > delta && log.verdict_at(d - 1) == Some("unsat"));
            let status = if proven {
                Status::Optimal
            } else if log.records.iter().any(|r| r.t_max < d && r.verdict != "unsat") {
                Status::NearOptimal
            } else {
                // every smaller depth was unsat, so d - 1 was too
                Status::Optimal
            };
            return Ok(SearchResult { schedule: Some(schedule), status, log });
        }
    }
    Ok(SearchResult { schedule: None, status: Status::Fallback, log })
}

#[derive(Clone, Debug)]
pub struct CompileResult {
    pub schedule: Schedule,
    pub status: Status,
    pub log: DepthSearchLog,
}

/// [`solve_optimal`] with the pipeline's fallback: the coloration schedule, or the ASAP schedule
/// when coloration is not valid for the code.
pub fn compile(code: &StabilizerCode, opts: &SearchOptions<'_>) -> Result<CompileResult> {
    let r = solve_optimal(code, opts)?;
    let schedule = match r.schedule {
        Some(s) => s,
        None => coloration_schedule(code).unwrap_or_else(|_| asap_schedule(code)),
    };
    Ok(CompileResult { schedule, status: r.status, log: r.log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{steane, surface_code};
    use crate::gf2::BitMatrix;

    fn opts(seed: u64) -> SearchOptions<'static> {
        SearchOptions::new(Duration::from_secs(60), seed, embedded())
    }

    #[test]
    fn surface3_depth4() {
        let code = surface_code(3).unwrap().to_bsf();
        let r = solve_optimal(&code, &opts(1)).unwrap();
        assert_eq!(r.schedule.unwrap().depth(), 4);
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.log.records.len(), 1);
        assert_eq!(r.log.records[0].t_max, 4);
    }

    #[test]
    fn steane_optimal() {
        let r = solve_optimal(&steane(), &opts(2)).unwrap();
        let s = r.schedule.unwrap();
        assert!(validate_schedule(&steane(), &s).is_empty());
        assert!(s.depth() >= 6);
        assert_eq!(r.status, Status::Optimal);
    }

    #[test]
    fn zero_timeout_falls_back() {
        let code = surface_code(5).unwrap().to_bsf();
        let mut o = opts(0);
        o.per_depth_timeout = Duration::ZERO;
        o.budget = Some(Duration::ZERO);
        let r = compile(&code, &o).unwrap();
        assert_eq!(r.status, Status::Fallback);
        assert_eq!(r.schedule.depth(), 8);
        assert!(r.log.records.iter().all(|x| x.verdict == "skipped"));
        assert!(r.log.records.windows(2).all(|w| w[0].t_max < w[1].t_max));
    }

    #[test]
    fn cancellation_counts_as_timeout() {
        let code = StabilizerCode::new("w3", BitMatrix::from_strs(&["111000"])).unwrap();
        let flag = AtomicBool::new(true);
        let mut o = opts(0);
        o.cancel = Some(&flag);
        // tiny problems are decided before the first cancellation check
        let r = solve_optimal(&code, &o).unwrap();
        assert_eq!(r.schedule.unwrap().depth(), 3);
    }
}
