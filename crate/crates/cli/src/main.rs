//! `workbench`: batch front end for the Lie-Rinehart workbench.
//!
//! Every subcommand prints one report, JSON by default. Exit codes: 0 success,
//! 1 internal inconsistency, 2 malformed input, 3 unsupported grading,
//! 4 precondition violation.

mod commands;
mod error;
mod job;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use workbench_core::env::Strategy;
use workbench_core::lralg::DEFAULT_AXIOM_SEED;
use workbench_core::Mode;

use crate::commands::Outcome;
use crate::error::{CliError, CliResult};
use crate::job::Job;

#[derive(Parser)]
#[command(name = "workbench", version, about = "Lie-Rinehart cohomology, enveloping algebras and connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Args, Clone)]
struct Common {
    /// Job file with the presentation and command data.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Built-in algebra as `kind:size`, e.g. `torus:2`; overrides the job presentation.
    #[arg(long, global = true)]
    builtin: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Seed for the randomized axiom checks.
    #[arg(long, global = true, default_value_t = DEFAULT_AXIOM_SEED)]
    seed: u64,
    /// Multidegree window half-width D.
    #[arg(long, global = true, default_value_t = 2)]
    window: u32,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Window cohomology of the algebra.
    Cohomology {
        /// Single degree; all degrees when omitted.
        #[arg(long)]
        p: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized Lie-Rinehart axiom checks.
    Axioms {
        /// Include the presentation schema in the report.
        #[arg(long)]
        describe: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Overlap checks of the enveloping-algebra rewriting system.
    Confluence {
        #[arg(long)]
        mode: Option<Mode>,
        #[command(flatten)]
        common: Common,
    },
    /// Normal form of the job `word`.
    NormalForm {
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated module with its canonical connection.
    Vki {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        i: Option<usize>,
        /// Tabulate enumerated against closed-form ranks for 1 ≤ l,k,i ≤ N.
        #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "4")]
        rank_table: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Curvature, first Chern class and Chern character of the job connection.
    Chern {
        #[command(flatten)]
        common: Common,
    },
    /// Formal ψ class of the job cochain, and optionally its exterior power line class.
    Psi {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// The η and ω ledger constructions for the job `classes`.
    KernelDemo {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Cohomology { common, .. }
            | Command::Axioms { common, .. }
            | Command::Confluence { common, .. }
            | Command::NormalForm { common, .. }
            | Command::Vki { common, .. }
            | Command::Chern { common }
            | Command::Psi { common, .. }
            | Command::KernelDemo { common } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Cohomology { .. } => "cohomology",
            Command::Axioms { .. } => "axioms",
            Command::Confluence { .. } => "confluence",
            Command::NormalForm { .. } => "normal-form",
            Command::Vki { .. } => "vki",
            Command::Chern { .. } => "chern",
            Command::Psi { .. } => "psi",
            Command::KernelDemo { .. } => "kernel-demo",
        }
    }
}

fn run(cmd: &Command) -> CliResult<Outcome> {
    let c = cmd.common();
    let job = match &c.input {
        Some(path) => Job::load(path)?,
        None => Job::default(),
    };
    let builtin = c.builtin.as_deref();
    let algebra = || job.algebra(builtin, c.seed);
    let mode = |m: &Option<Mode>| m.or(job.mode).unwrap_or_default();
    match cmd {
        Command::Cohomology { p, .. } => commands::cohomology(&algebra()?, *p, c.window),
        Command::Axioms { describe, .. } => commands::axioms(&job, builtin, c.seed, *describe),
        Command::Confluence { mode: m, .. } => commands::confluence(&job, &algebra()?, mode(m)),
        Command::NormalForm { mode: m, strategy, .. } => {
            let strategy = strategy.or(job.strategy).unwrap_or_default();
            commands::normal_form(&job, &algebra()?, mode(m), strategy)
        }
        Command::Vki { rank_table: Some(max), .. } => commands::rank_table(*max),
        Command::Vki { k, i, .. } => commands::vki(&job, &algebra()?, *k, *i),
        Command::Chern { .. } => commands::chern(&job, &algebra()?, c.window),
        Command::Psi { k, i, d, .. } => commands::psi(&job, &algebra()?, *k, *i, *d, c.window),
        Command::KernelDemo { .. } => commands::kernel_demo(&job, &algebra()?, c.window),
    }
}

fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Table => table::render(report),
    }
}

fn emit(text: &str, path: Option<&PathBuf>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("WORKBENCH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let c = cli.command.common();
    let result = run(&cli.command).and_then(|outcome| {
        let mut report = json!({
            "command": cli.command.name(),
            "seed": c.seed,
            "window": c.window,
        });
        report["result"] = outcome.report;
        emit(&render(&report, c.output), c.report.as_ref())?;
        match outcome.rejected {
            Some(reason) => Err(CliError::Rejected(reason)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
