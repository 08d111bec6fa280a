//! The `qsched` command line: compile, baseline, validate, verify, emit, filter, bench and
//! catalog listing on top of the `qldpc-sched` library.
//!
//! Exit statuses are collected in [`exit`].

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod filter;
pub mod io;

pub use cli::{run, Cli};
pub use config::{Overrides, RunConfig};
pub use error::{exit, CliError, Result};
pub use filter::{cmd_filter, EvalLine, FilterReport, Trial};
