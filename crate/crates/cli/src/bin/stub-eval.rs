//! Stand-in evaluator honoring the filter contract.
//!
//! `stub-eval <circuit> --shots K [--table a,b,c]` prints `{"shots":K,"errors":E,"ler":E/K}`.
//! With a table, the rate is the table entry of the trial number in the file name
//! (`trial_002.stim` reads the second entry); otherwise it is derived from a hash of the file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qsched_cli::EvalLine;
use sha2::{Digest, Sha256};

#[derive(Parser)]
struct Args {
    circuit: PathBuf,
    #[arg(long)]
    shots: u64,
    #[arg(long, value_delimiter = ',')]
    table: Option<Vec<f64>>,
}

fn trial_number(path: &std::path::Path) -> Option<usize> {
    let stem = path.file_stem()?.to_str()?;
    stem.strip_prefix("trial_")?.parse().ok()
}

fn rate(args: &Args, text: &str) -> Result<f64, String> {
    match &args.table {
        Some(table) => {
            let i = trial_number(&args.circuit)
                .ok_or_else(|| format!("no trial number in {}", args.circuit.display()))?;
            table
                .get(i.wrapping_sub(1))
                .copied()
                .ok_or_else(|| format!("trial {i} outside a table of {}", table.len()))
        }
        None => {
            let digest = Sha256::digest(text.as_bytes());
            let word = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
            Ok((word >> 11) as f64 / (1u64 << 53) as f64 * 0.5)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.circuit) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", args.circuit.display());
            return ExitCode::from(4);
        }
    };
    match rate(&args, &text) {
        Ok(p) if (0.0..=1.0).contains(&p) && args.shots > 0 => {
            let errors = (p * args.shots as f64).round() as u64;
            println!("{}", serde_json::to_string(&EvalLine::new(args.shots, errors)).expect("serializes"));
            ExitCode::SUCCESS
        }
        Ok(p) => {
            eprintln!("rate {p} or shot count {} out of range", args.shots);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
