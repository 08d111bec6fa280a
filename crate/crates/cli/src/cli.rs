use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{
    catalog_table, cmd_baseline, cmd_bench, cmd_compile, cmd_emit, cmd_validate, cmd_verify, cmd_verify_circuit,
};
use crate::config::{Overrides, RunConfig};
use crate::error::{exit, CliError, Result};
use crate::filter::cmd_filter;
use qldpc_sched::schedule::Method;

#[derive(Debug, Parser)]
#[command(name = "qsched", version, about = "Depth-optimal syndrome extraction scheduling for qLDPC codes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file with defaults for any of the options below
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Print the resolved configuration and exit
    #[arg(long, global = true)]
    pub show_config: bool,

    /// Catalog name, surface:d=<odd>, or a code file (BSF or CSS)
    #[arg(long, global = true)]
    pub code: Option<String>,

    /// Seconds allowed per depth attempt
    #[arg(long, global = true)]
    pub timeout_per_depth: Option<f64>,

    /// Seconds allowed for the whole depth search (0 for no limit)
    #[arg(long, global = true)]
    pub budget: Option<f64>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// embedded or dimacs:<solver path>
    #[arg(long, global = true)]
    pub backend: Option<String>,

    /// Skip the symmetry-restricted first attempt at each depth
    #[arg(long, global = true)]
    pub no_symmetry: bool,

    #[arg(long, global = true)]
    pub rounds: Option<usize>,

    /// Memory experiment basis, x or z
    #[arg(long, global = true)]
    pub basis: Option<String>,

    /// Depolarizing strength p
    #[arg(long, global = true)]
    pub noise: Option<f64>,

    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Evaluator command, run as `<cmd> <circuit> --shots <k>`
    #[arg(long, global = true)]
    pub evaluator: Option<String>,

    #[arg(long, global = true)]
    pub shots: Option<u64>,

    /// Parallel filter trials
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Output file (directory for filter); standard output when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            code: self.code.clone(),
            timeout_per_depth: self.timeout_per_depth,
            budget: self.budget,
            seed: self.seed,
            backend: self.backend.clone(),
            symmetry: self.no_symmetry.then_some(false),
            rounds: self.rounds,
            basis: self.basis.clone(),
            noise: self.noise,
            trials: self.trials,
            evaluator: self.evaluator.clone(),
            shots: self.shots,
            workers: self.workers,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BaselineMethod {
    Asap,
    Color,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a minimum-depth schedule
    Compile,
    /// Schedule with a baseline method, no solver
    Baseline {
        #[arg(long, value_enum)]
        method: BaselineMethod,
    },
    /// Check a schedule file against the scheduling constraints
    Validate { schedule: PathBuf },
    /// Check a schedule's round circuit on the stabilizer simulator, or replay a circuit file
    Verify {
        schedule: Option<PathBuf>,
        /// Replay this circuit without noise and require all detectors to be zero
        #[arg(long, conflicts_with = "schedule")]
        circuit: Option<PathBuf>,
        /// Skip the single-error syndrome check
        #[arg(long)]
        no_oracle: bool,
        /// Also compare the round's unitary part with this schedule's
        #[arg(long)]
        equiv: Option<PathBuf>,
    },
    /// Write a memory-experiment circuit for a schedule
    Emit { schedule: PathBuf },
    /// Compile several seeds, score each circuit with the evaluator, keep the best
    Filter,
    /// Compile surface codes over a range of odd distances and tabulate depth and time
    Bench {
        #[arg(long, default_value_t = 3)]
        from: usize,
        #[arg(long, default_value_t = 13)]
        to: usize,
    },
    /// Built-in codes
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
}

/// Parses `args` (program name first) and runs the command; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    let file = g.config.as_deref().map(Overrides::load).transpose()?;
    let cfg = RunConfig::resolve(file.as_ref(), &g.overrides())?;
    if g.show_config {
        print!("{}", cfg.to_toml());
        return Ok(exit::OK);
    }
    let out = g.out.as_deref();
    let Some(command) = &cli.command else {
        return Err(CliError::Usage("no command given; see --help".into()));
    };
    match command {
        Command::Compile => cmd_compile(&cfg, out),
        Command::Baseline { method } => {
            let m = match method {
                BaselineMethod::Asap => Method::Asap,
                BaselineMethod::Color => Method::Color,
            };
            cmd_baseline(&cfg, m, out)
        }
        Command::Validate { schedule } => cmd_validate(&cfg, schedule),
        Command::Verify { schedule, circuit, no_oracle, equiv } => match (schedule, circuit) {
            (Some(s), None) => cmd_verify(&cfg, s, !no_oracle, equiv.as_deref()),
            (None, Some(c)) => cmd_verify_circuit(&cfg, c),
            _ => Err(CliError::Usage("verify needs a schedule file or --circuit".into())),
        },
        Command::Emit { schedule } => cmd_emit(&cfg, schedule, out),
        Command::Filter => {
            let evaluator = cfg.evaluator.clone().ok_or_else(|| CliError::Usage("filter needs --evaluator".into()))?;
            let dir = out.unwrap_or(Path::new("qsched-filter"));
            let report = cmd_filter(&cfg, &evaluator, dir)?;
            for t in &report.trials {
                println!("trial {:>3}  seed {:>4}  depth {:>2}  {:<12}  metric {}", t.trial, t.seed, t.depth, t.status.as_str(), t.metric);
            }
            println!("selected trial {} (report in {})", report.selected, dir.join("filter.json").display());
            Ok(exit::OK)
        }
        Command::Bench { from, to } => {
            let ds: Vec<usize> = (*from..=*to).step_by(2).collect();
            cmd_bench(&cfg, &ds, out)
        }
        Command::Catalog { action: CatalogAction::List } => {
            print!("{}", catalog_table());
            Ok(exit::OK)
        }
    }
}
