//! On-disk schedule record (JSON).

use serde::{Deserialize, Serialize};

use super::{DepthSearchLog, Schedule};
use crate::code::{Pauli, StabilizerCode};
use crate::error::{Error, Result};

pub const FORMAT: &str = "qsched-schedule/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Depth proven minimal.
    Optimal,
    /// Satisfiable depth found after a smaller depth timed out.
    NearOptimal,
    /// No solver result; a baseline schedule stands in.
    Fallback,
    /// Produced by a baseline scheduler on request.
    Baseline,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::NearOptimal => "near-optimal",
            Status::Fallback => "fallback",
            Status::Baseline => "baseline",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Asc,
    Asap,
    Color,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub check: usize,
    pub qubit: usize,
    pub pauli: Pauli,
    pub tick: u32,
}

/// The deterministic part of a depth record; wall times live in a separate log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchEntry {
    pub t_max: usize,
    pub verdict: String,
    pub seed: u64,
    #[serde(default)]
    pub restricted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(seed: u64, config_hash: impl Into<String>) -> Self {
        Self { tool_version: env!("CARGO_PKG_VERSION").to_string(), seed, config_hash: config_hash.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub format: String,
    pub code: String,
    pub n: usize,
    pub m: usize,
    pub depth: usize,
    pub method: Method,
    pub status: Status,
    pub entries: Vec<Entry>,
    pub search: Vec<SearchEntry>,
    pub provenance: Provenance,
}

impl ScheduleRecord {
    pub fn new(
        code: &StabilizerCode,
        schedule: &Schedule,
        method: Method,
        status: Status,
        log: Option<&DepthSearchLog>,
        provenance: Provenance,
    ) -> Result<Self> {
        if (schedule.num_checks(), schedule.num_qubits()) != (code.m(), code.n()) {
            return Err(Error::InvalidSchedule(format!(
                "schedule shape {}x{} does not match code {}x{}",
                schedule.num_checks(),
                schedule.num_qubits(),
                code.m(),
                code.n()
            )));
        }
        let entries = schedule
            .assigned()
            .map(|(check, qubit, tick)| {
                let pauli = code.pauli_at(check, qubit).ok_or_else(|| {
                    Error::InvalidSchedule(format!("tick on non-edge ({check}, {qubit})"))
                })?;
                if tick < 1 {
                    return Err(Error::InvalidSchedule(format!("tick {tick} at ({check}, {qubit})")));
                }
                Ok(Entry { check, qubit, pauli, tick: tick as u32 })
            })
            .collect::<Result<Vec<_>>>()?;
        let search = log
            .map(|l| {
                l.records
                    .iter()
                    .map(|r| SearchEntry { t_max: r.t_max, verdict: r.verdict.clone(), seed: r.seed, restricted: r.restricted })
                    .collect()
            })
            .unwrap_or_default();
        Ok(Self {
            format: FORMAT.into(),
            code: code.name().into(),
            n: code.n(),
            m: code.m(),
            depth: schedule.depth(),
            method,
            status,
            entries,
            search,
            provenance,
        })
    }

    /// The tick table. Rejects out-of-range or duplicate entries and a depth field that
    /// disagrees with the entries.
    pub fn schedule(&self) -> Result<Schedule> {
        let mut s = Schedule::empty(self.m, self.n);
        for e in &self.entries {
            if e.check >= self.m || e.qubit >= self.n {
                return Err(Error::InvalidSchedule(format!(
                    "entry ({}, {}) outside {}x{}",
                    e.check, e.qubit, self.m, self.n
                )));
            }
            if e.tick == 0 {
                return Err(Error::InvalidSchedule(format!("tick 0 at ({}, {})", e.check, e.qubit)));
            }
            if s.get(e.check, e.qubit) != -1 {
                return Err(Error::InvalidSchedule(format!("duplicate entry ({}, {})", e.check, e.qubit)));
            }
            s.set(e.check, e.qubit, e.tick as i32);
        }
        if s.depth() != self.depth {
            return Err(Error::InvalidSchedule(format!(
                "depth field {} but entries reach tick {}",
                self.depth,
                s.depth()
            )));
        }
        Ok(s)
    }

    /// Checks that the record was made for `code`: same shape and matching Pauli labels.
    pub fn check_matches(&self, code: &StabilizerCode) -> Result<()> {
        if (self.m, self.n) != (code.m(), code.n()) {
            return Err(Error::InvalidSchedule(format!(
                "schedule is for a {}x{} code but {} is {}x{}",
                self.m,
                self.n,
                code.name(),
                code.m(),
                code.n()
            )));
        }
        for e in &self.entries {
            if code.pauli_at(e.check, e.qubit) != Some(e.pauli) {
                return Err(Error::InvalidSchedule(format!(
                    "entry ({}, {}) labelled {} does not match the code",
                    e.check, e.qubit, e.pauli
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("schedule record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.format != FORMAT {
            return Err(Error::InvalidSchedule(format!("unsupported format {:?}", r.format)));
        }
        Ok(r)
    }
}
