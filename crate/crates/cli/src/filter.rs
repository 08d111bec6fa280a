//! Trial-and-select filter: compile several schedules with distinct seeds, score each emitted
//! circuit with an external evaluator, keep the best.
//!
//! The evaluator is run as `<command> <circuit-file> --shots <k>` and must print one JSON line
//! `{"shots": K, "errors": E, "ler": E/K}` on standard output.

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{compile_code, load_code, memory_circuit};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::atomic_write;
use qldpc_sched::schedule::{Method, Provenance, ScheduleRecord, Status};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalLine {
    pub shots: u64,
    pub errors: u64,
    pub ler: f64,
}

impl EvalLine {
    pub fn new(shots: u64, errors: u64) -> Self {
        Self { shots, errors, ler: errors as f64 / shots as f64 }
    }

    /// Parses the evaluator's standard output: exactly one non-empty line holding the record,
    /// consistent with the requested shot count.
    pub fn parse(stdout: &str, shots: u64) -> Result<Self> {
        let lines: Vec<&str> = stdout.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let [line] = lines.as_slice() else {
            return Err(CliError::Evaluator(format!("expected one output line, got {}", lines.len())));
        };
        let e: EvalLine =
            serde_json::from_str(line).map_err(|err| CliError::Evaluator(format!("bad line {line:?}: {err}")))?;
        if e.shots != shots {
            return Err(CliError::Evaluator(format!("asked for {shots} shots, got {}", e.shots)));
        }
        if e.errors > e.shots {
            return Err(CliError::Evaluator(format!("{} errors in {} shots", e.errors, e.shots)));
        }
        let expected = e.errors as f64 / e.shots as f64;
        if !e.ler.is_finite() || (e.ler - expected).abs() > 1e-9 {
            return Err(CliError::Evaluator(format!("ler {} is not errors/shots = {expected}", e.ler)));
        }
        Ok(e)
    }
}

/// Runs the evaluator on one circuit file.
pub fn evaluate(command: &str, circuit: &Path, shots: u64) -> Result<EvalLine> {
    let words = shlex::split(command).filter(|w| !w.is_empty()).ok_or_else(|| {
        CliError::Usage(format!("cannot split evaluator command {command:?}"))
    })?;
    let (program, args) = words.split_first().ok_or_else(|| CliError::Usage("empty evaluator command".into()))?;
    let output = Command::new(program)
        .args(args)
        .arg(circuit)
        .arg("--shots")
        .arg(shots.to_string())
        .stdin(Stdio::null())
        .output()
        .map_err(|e| CliError::Evaluator(format!("cannot run {program}: {e}")))?;
    if !output.status.success() {
        return Err(CliError::Evaluator(format!(
            "{program} failed ({}): {}",
            output.status,
            String::from_utf8_lossy(&output.stderr).trim()
        )));
    }
    EvalLine::parse(&String::from_utf8_lossy(&output.stdout), shots)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    /// 1-based trial id.
    pub trial: usize,
    pub seed: u64,
    pub depth: usize,
    pub status: Status,
    pub metric: f64,
    pub shots: u64,
    pub errors: u64,
    pub circuit: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub code: String,
    pub trials: Vec<Trial>,
    /// Id of the trial with the smallest metric; ties go to the earlier trial.
    pub selected: usize,
    /// Running minimum of the metric over trials `1..=i`.
    pub best_so_far: Vec<f64>,
    pub provenance: Provenance,
}

/// Index of the smallest value, the first on ties. `None` for an empty slice.
pub fn argmin(metrics: &[f64]) -> Option<usize> {
    metrics
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
}

pub fn running_min(metrics: &[f64]) -> Vec<f64> {
    metrics
        .iter()
        .scan(f64::INFINITY, |best, &m| {
            *best = best.min(m);
            Some(*best)
        })
        .collect()
}

pub fn trial_circuit_name(trial: usize) -> String {
    format!("trial_{trial:03}.stim")
}

/// Compiles `cfg.trials` schedules with seeds `seed, seed+1, …`, emits each as a circuit in
/// `out_dir`, scores them with `evaluator` on up to `cfg.workers` threads, and writes
/// `filter.json` and `selected.json` next to the circuits.
pub fn cmd_filter(cfg: &RunConfig, evaluator: &str, out_dir: &Path) -> Result<FilterReport> {
    if cfg.trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    let code = load_code(cfg.code_source()?)?;
    let hash = cfg.hash(&format!("filter:{evaluator}"));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;

    let results: Vec<(Trial, ScheduleRecord)> = pool.install(|| {
        (1..=cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let seed = cfg.seed.wrapping_add(trial as u64 - 1);
                let r = compile_code(&code, cfg, seed)?;
                let provenance = Provenance::new(seed, hash.clone());
                let record = ScheduleRecord::new(&code, &r.schedule, Method::Asc, r.status, Some(&r.log), provenance.clone())?;
                let circuit = out_dir.join(trial_circuit_name(trial));
                atomic_write(&circuit, &memory_circuit(&code, &r.schedule, cfg, &provenance)?)?;
                let e = evaluate(evaluator, &circuit, cfg.shots)?;
                let t = Trial {
                    trial,
                    seed,
                    depth: r.schedule.depth(),
                    status: r.status,
                    metric: e.ler,
                    shots: e.shots,
                    errors: e.errors,
                    circuit,
                };
                Ok((t, record))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let metrics: Vec<f64> = results.iter().map(|(t, _)| t.metric).collect();
    let best = argmin(&metrics).expect("at least one trial");
    let report = FilterReport {
        code: code.name().into(),
        best_so_far: running_min(&metrics),
        selected: results[best].0.trial,
        trials: results.iter().map(|(t, _)| t.clone()).collect(),
        provenance: Provenance::new(cfg.seed, hash),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    atomic_write(&out_dir.join("filter.json"), &text)?;
    atomic_write(&out_dir.join("selected.json"), &results[best].1.to_json())?;
    Ok(report)
}
