//! Browser bindings: schedule a code, validate an edited schedule, emit its round circuit.
//!
//! Every operation takes a code source (a catalog name, `surface:d=<odd>`, or pasted BSF/CSS
//! text) and exchanges schedules in the same JSON record format the command line writes.

use std::time::Duration;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qldpc_sched::circuit::build_round;
use qldpc_sched::code::{catalog, parse_code_text, resolve, StabilizerCode};
use qldpc_sched::schedule::{
    asap_schedule, coloration_schedule, compile, embedded, lower_bound, validate_schedule, Method, Provenance,
    ScheduleRecord, SearchOptions, Status,
};
use web_time::Instant;

fn load_code(source: &str) -> Result<StabilizerCode, String> {
    let source = source.trim();
    let known = source.starts_with("surface:") || catalog().iter().any(|e| e.name == source);
    if known {
        resolve(source).map_err(|e| e.to_string())
    } else {
        parse_code_text(source).map(|c| c.with_name("pasted")).map_err(|e| e.to_string())
    }
}

#[derive(Serialize)]
struct Scheduled {
    record: ScheduleRecord,
    lower_bound: usize,
    seconds: f64,
}

/// Schedules `source` with `method` (`asc`, `color` or `asap`). The depth search gets
/// `timeout_ms` per depth.
pub fn schedule_json(source: &str, method: &str, timeout_ms: u32, seed: u64) -> Result<String, String> {
    let code = load_code(source)?;
    let start = Instant::now();
    let (schedule, method, status, log) = match method {
        "asc" => {
            let opts = SearchOptions::new(Duration::from_millis(timeout_ms.into()), seed, embedded());
            let r = compile(&code, &opts).map_err(|e| e.to_string())?;
            (r.schedule, Method::Asc, r.status, Some(r.log))
        }
        "color" => {
            let s = coloration_schedule(&code).map_err(|e| e.to_string())?;
            (s, Method::Color, Status::Baseline, None)
        }
        "asap" => (asap_schedule(&code), Method::Asap, Status::Baseline, None),
        other => return Err(format!("unknown method {other:?}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let record = ScheduleRecord::new(&code, &schedule, method, status, log.as_ref(), Provenance::new(seed, "web"))
        .map_err(|e| e.to_string())?;
    let out = Scheduled { record, lower_bound: lower_bound(&code), seconds };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Validation {
    depth: usize,
    violations: Vec<String>,
}

/// Checks a schedule record against `source`; the result lists violations as text.
pub fn validate_json(source: &str, record: &str) -> Result<String, String> {
    let code = load_code(source)?;
    let record = ScheduleRecord::from_json(record).map_err(|e| e.to_string())?;
    record.check_matches(&code).map_err(|e| e.to_string())?;
    let s = record.schedule().map_err(|e| e.to_string())?;
    let violations = validate_schedule(&code, &s).iter().map(|v| format!("{:?}: {v}", v.kind())).collect();
    serde_json::to_string(&Validation { depth: s.depth(), violations }).map_err(|e| e.to_string())
}

/// One syndrome extraction round for a valid schedule, as circuit text.
pub fn round_circuit(source: &str, record: &str) -> Result<String, String> {
    let code = load_code(source)?;
    let record = ScheduleRecord::from_json(record).map_err(|e| e.to_string())?;
    record.check_matches(&code).map_err(|e| e.to_string())?;
    let s = record.schedule().map_err(|e| e.to_string())?;
    build_round(&code, &s).map(|c| c.to_text()).map_err(|e| e.to_string())
}

pub fn catalog_names() -> Vec<String> {
    catalog().into_iter().map(|e| e.name).collect()
}

#[wasm_bindgen]
pub fn schedule(source: &str, method: &str, timeout_ms: u32, seed: u32) -> Result<String, JsValue> {
    schedule_json(source, method, timeout_ms, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn validate(source: &str, record: &str) -> Result<String, JsValue> {
    validate_json(source, record).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn emit_round(source: &str, record: &str) -> Result<String, JsValue> {
    round_circuit(source, record).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn codes() -> Vec<String> {
    catalog_names()
}
