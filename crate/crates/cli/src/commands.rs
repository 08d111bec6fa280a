use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{exit, CliError, Result};
use crate::io::{atomic_write, read_text, sidecar_path, write_or_print};
use qldpc_sched::circuit::{build_memory_experiment, build_round, insert_noise, Circuit, NoiseModel};
use qldpc_sched::code::{catalog, resolve, surface_code, Construction, StabilizerCode};
use qldpc_sched::schedule::{
    asap_schedule, coloration_schedule, compile, validate_schedule, CompileResult, DepthRecord, Method, Provenance,
    Schedule, ScheduleRecord, SearchOptions, Status,
};
use qldpc_sched::tableau::{circuits_equivalent, detector_values, verify_round_with};

/// Resolves a code source, attributing file errors to the path.
pub fn load_code(source: &str) -> Result<StabilizerCode> {
    resolve(source).map_err(|e| match e {
        qldpc_sched::Error::Io(io) => CliError::io(source, io),
        e @ qldpc_sched::Error::Parse { .. } => CliError::parse(source, e),
        e => e.into(),
    })
}

pub fn load_record(path: &Path) -> Result<ScheduleRecord> {
    ScheduleRecord::from_json(&read_text(path)?).map_err(|e| CliError::parse(path, e))
}

/// The code named by `--code`, or else the one recorded in the schedule file, together with
/// the schedule checked against it.
pub fn load_schedule(cfg: &RunConfig, path: &Path) -> Result<(StabilizerCode, ScheduleRecord, Schedule)> {
    let record = load_record(path)?;
    let code = load_code(cfg.code.as_deref().unwrap_or(&record.code))?;
    record.check_matches(&code).map_err(|e| CliError::parse(path, e))?;
    let schedule = record.schedule().map_err(|e| CliError::parse(path, e))?;
    Ok((code, record, schedule))
}

/// Runs the depth search with the configured backend and refuses to return a schedule that
/// fails validation.
pub fn compile_code(code: &StabilizerCode, cfg: &RunConfig, seed: u64) -> Result<CompileResult> {
    let backend = cfg.backend_spec()?.build();
    let mut opts = SearchOptions::new(cfg.per_depth_timeout(), seed, backend.as_ref());
    opts.budget = cfg.total_budget();
    opts.symmetry = cfg.symmetry;
    let r = compile(code, &opts)?;
    let violations = validate_schedule(code, &r.schedule);
    if let Some(v) = violations.first() {
        return Err(CliError::Validation(format!("compiled schedule for {} is invalid: {v}", code.name())));
    }
    Ok(r)
}

pub fn status_exit_code(status: Status) -> i32 {
    match status {
        Status::Optimal | Status::Baseline => exit::OK,
        Status::NearOptimal => exit::NEAR_OPTIMAL,
        Status::Fallback => exit::FALLBACK,
    }
}

#[derive(Serialize)]
struct CompileLog<'a> {
    code: &'a str,
    status: Status,
    depth: usize,
    total_seconds: f64,
    records: &'a [DepthRecord],
    provenance: &'a Provenance,
}

pub fn cmd_compile(cfg: &RunConfig, out: Option<&Path>) -> Result<i32> {
    let code = load_code(cfg.code_source()?)?;
    let start = Instant::now();
    let r = compile_code(&code, cfg, cfg.seed)?;
    let total_seconds = start.elapsed().as_secs_f64();
    let provenance = Provenance::new(cfg.seed, cfg.hash("compile"));
    let record = ScheduleRecord::new(&code, &r.schedule, Method::Asc, r.status, Some(&r.log), provenance.clone())?;
    write_or_print(out, &record.to_json())?;
    if let Some(path) = out {
        let log = CompileLog {
            code: code.name(),
            status: r.status,
            depth: r.schedule.depth(),
            total_seconds,
            records: &r.log.records,
            provenance: &provenance,
        };
        let mut text = serde_json::to_string_pretty(&log).expect("log serializes");
        text.push('\n');
        atomic_write(&sidecar_path(path), &text)?;
    }
    eprintln!("{}: depth {} ({}) in {total_seconds:.2}s", code.name(), r.schedule.depth(), r.status.as_str());
    Ok(status_exit_code(r.status))
}

pub fn cmd_baseline(cfg: &RunConfig, method: Method, out: Option<&Path>) -> Result<i32> {
    let code = load_code(cfg.code_source()?)?;
    let (schedule, extra) = match method {
        Method::Asap => (asap_schedule(&code), "baseline-asap"),
        Method::Color => (
            coloration_schedule(&code).map_err(|e| CliError::Validation(format!("coloration: {e}")))?,
            "baseline-color",
        ),
        Method::Asc => return Err(CliError::Usage("use compile for ASC schedules".into())),
    };
    let provenance = Provenance::new(cfg.seed, cfg.hash(extra));
    let record = ScheduleRecord::new(&code, &schedule, method, Status::Baseline, None, provenance)?;
    write_or_print(out, &record.to_json())?;
    eprintln!("{}: depth {} ({extra})", code.name(), schedule.depth());
    Ok(exit::OK)
}

pub fn cmd_validate(cfg: &RunConfig, schedule: &Path) -> Result<i32> {
    let (code, _, s) = load_schedule(cfg, schedule)?;
    let violations = validate_schedule(&code, &s);
    if violations.is_empty() {
        println!("valid: {} depth {}", code.name(), s.depth());
        return Ok(exit::OK);
    }
    for v in &violations {
        println!("{:?}: {v}", v.kind());
    }
    println!("invalid: {} violation(s)", violations.len());
    Ok(exit::VALIDATION)
}

/// The unitary part of a round: basis changes and entangling layers, without reset or readout.
fn unitary_part(round: &Circuit) -> Circuit {
    let mut c = Circuit::new();
    for i in round.instructions.iter().filter(|i| i.op.is_unitary()) {
        c.push(i.clone());
    }
    c
}

pub fn cmd_verify(cfg: &RunConfig, schedule: &Path, oracle: bool, equiv: Option<&Path>) -> Result<i32> {
    let (code, _, s) = load_schedule(cfg, schedule)?;
    let round = build_round(&code, &s)?;
    let report = verify_round_with(&code, &round, cfg.seed, oracle)?;
    println!("{report}");
    let mut ok = report.passed();
    if let Some(other) = equiv {
        let (code2, _, s2) = load_schedule(cfg, other)?;
        if code2.matrix() != code.matrix() {
            return Err(CliError::Usage(format!("{} is for a different code", other.display())));
        }
        let same = circuits_equivalent(&unitary_part(&round), &unitary_part(&build_round(&code2, &s2)?))?;
        println!("equivalent to {}: {}", other.display(), if same { "yes" } else { "no" });
        ok &= same;
    }
    Ok(if ok { exit::OK } else { exit::VALIDATION })
}

/// Noiseless replay of a circuit file: every detector and observable must be deterministic
/// and zero.
pub fn cmd_verify_circuit(cfg: &RunConfig, path: &Path) -> Result<i32> {
    let text = read_text(path)?;
    let circuit = Circuit::parse(&text).map_err(|e| CliError::parse(path, e))?;
    let mut clean = Circuit::new();
    for i in circuit.instructions.iter().filter(|i| !i.op.is_noise()) {
        clean.push(i.clone());
    }
    let (dets, obs) = detector_values(&clean, cfg.seed)?;
    let bad = |v: &[(bool, bool)]| v.iter().filter(|&&(det, val)| !det || val).count();
    let (bd, bo) = (bad(&dets), bad(&obs));
    println!("detectors: {} of {} deterministic zero", dets.len() - bd, dets.len());
    println!("observables: {} of {} deterministic zero", obs.len() - bo, obs.len());
    Ok(if bd + bo == 0 { exit::OK } else { exit::VALIDATION })
}

/// Memory-experiment circuit text for `schedule`, with noise if the configured strength is
/// positive, headed by a provenance comment.
pub fn memory_circuit(code: &StabilizerCode, schedule: &Schedule, cfg: &RunConfig, provenance: &Provenance) -> Result<String> {
    let css = code.to_css().map_err(|e| CliError::Validation(e.to_string()))?;
    if css.to_bsf().matrix() != code.matrix() {
        return Err(CliError::Validation(format!("{} must list its X checks before its Z checks", code.name())));
    }
    let mut c = build_memory_experiment(&css, schedule, cfg.rounds, cfg.basis()?)?;
    if cfg.noise > 0.0 {
        c = insert_noise(&c, NoiseModel::new(cfg.noise)?)?;
    }
    Ok(format!(
        "# qsched {} code={} seed={} config={}\n{}",
        provenance.tool_version,
        code.name(),
        provenance.seed,
        provenance.config_hash,
        c.to_text()
    ))
}

pub fn cmd_emit(cfg: &RunConfig, schedule: &Path, out: Option<&Path>) -> Result<i32> {
    let (code, record, s) = load_schedule(cfg, schedule)?;
    let provenance = Provenance::new(record.provenance.seed, cfg.hash("emit"));
    let text = memory_circuit(&code, &s, cfg, &provenance)?;
    write_or_print(out, &text)?;
    Ok(exit::OK)
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct BenchRow {
    pub d: usize,
    pub n: usize,
    pub depth: usize,
    pub status: String,
    pub seconds: f64,
    pub tool_version: String,
    pub seed: u64,
    pub config_hash: String,
}

pub fn bench_rows(cfg: &RunConfig, distances: &[usize]) -> Result<Vec<BenchRow>> {
    let hash = cfg.hash(&format!("bench{distances:?}"));
    let mut rows = Vec::new();
    for &d in distances {
        let code = surface_code(d)?.to_bsf();
        let start = Instant::now();
        let r = compile_code(&code, cfg, cfg.seed)?;
        let p = Provenance::new(cfg.seed, hash.clone());
        rows.push(BenchRow {
            d,
            n: code.n(),
            depth: r.schedule.depth(),
            status: r.status.as_str().into(),
            seconds: start.elapsed().as_secs_f64(),
            tool_version: p.tool_version,
            seed: p.seed,
            config_hash: p.config_hash,
        });
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["d", "n", "depth", "status", "seconds", "tool_version", "seed", "config_hash"])
        .expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv is utf-8")
}

pub fn cmd_bench(cfg: &RunConfig, distances: &[usize], out: Option<&Path>) -> Result<i32> {
    if let Some(d) = distances.iter().find(|&&d| d < 3 || d % 2 == 0) {
        return Err(CliError::Usage(format!("surface distances must be odd and at least 3, got {d}")));
    }
    let rows = bench_rows(cfg, distances)?;
    write_or_print(out, &bench_csv(&rows))?;
    Ok(exit::OK)
}

pub fn catalog_table() -> String {
    let mut out = String::new();
    for e in catalog() {
        let family = match e.construction {
            Construction::Steane => "steane",
            Construction::Surface { .. } => "surface",
            Construction::Bb { .. } => "bb",
            Construction::Gb { .. } => "gb",
            Construction::Hgp { .. } => "hgp",
            Construction::File { .. } => "file",
        };
        let params = format!("[[{},{},{}]]", e.expected.n, e.expected.k, e.expected.d);
        out.push_str(&format!("{:<10} {:<8} {:<14} {}\n", e.name, family, params, e.source));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_empty_range_is_header_only() {
        let csv = bench_csv(&[]);
        assert_eq!(csv, "d,n,depth,status,seconds,tool_version,seed,config_hash\n");
    }

    #[test]
    fn catalog_lists_every_entry() {
        let t = catalog_table();
        assert_eq!(t.lines().count(), catalog().len());
        assert!(t.lines().any(|l| l.starts_with("bb72 ") && l.contains("[[72,12,6]]")));
    }

    #[test]
    fn exit_codes_follow_status() {
        assert_eq!(status_exit_code(Status::Optimal), 0);
        assert_eq!(status_exit_code(Status::NearOptimal), 5);
        assert_eq!(status_exit_code(Status::Fallback), 3);
    }
}
