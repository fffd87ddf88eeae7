//! `spacevolve` command-line interface.
//!
//! Exit codes: 0 success, 1 a verified set has a violation or an output
//! could not be written, 2 configuration error, 3 backend failure, 4 bad
//! input (unparseable program, runtime error, malformed file).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use tracing_subscriber::EnvFilter;

use config::{DatasetKind, ProblemArgs, RunArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Backend(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Output(_) => 1,
            CliError::Config(_) => 2,
            CliError::Backend(_) => 3,
            CliError::Input(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spacevolve", version, about = "Evolve tunable priority programs and search their solution spaces")]
struct Cli {
    /// More log output on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SetKind {
    Capset,
    Admissible,
    Independent,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the evolution loop.
    Run(Box<RunArgs>),
    /// Score a program with no tunable sites.
    Evaluate {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Program file.
        #[arg(required_unless_present = "corpus")]
        file: Option<PathBuf>,
        /// Use a bundled program instead of a file (see `corpus`).
        #[arg(long, conflicts_with = "file")]
        corpus: Option<String>,
    },
    /// Check a JSON set file against the problem's constraint.
    Verify {
        #[arg(long, value_enum)]
        kind: SetKind,
        /// JSON array of vectors.
        file: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        w: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Cap-set capacity lower bound from an admissible-set size.
    Bound {
        /// Admissible-set size.
        #[arg(long)]
        s: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        w: u32,
        /// Block parameter, or `auto` to pick the best in 1..=12.
        #[arg(long, default_value = "auto")]
        m: String,
    },
    /// Generate a seeded bin-packing dataset.
    GenData {
        #[arg(long, value_enum)]
        dataset: DatasetKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults: 20 for or, 5 for weibull.
        #[arg(long)]
        instances: Option<usize>,
        /// Items per instance. Defaults: 120 for or, 5000 for weibull.
        #[arg(long)]
        items: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the best entries of a program database.
    Replay {
        #[arg(long)]
        db: PathBuf,
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Search the solution space of one tunable program.
    Xsearch {
        #[command(flatten)]
        problem: ProblemArgs,
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        batch_size: usize,
        #[arg(long, default_value_t = 3)]
        k_stall: usize,
        #[arg(long, default_value_t = 1)]
        top_k: usize,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the compacted program here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled programs, or print one.
    Corpus { name: Option<String> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let filter = EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default));
    tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();

    let result = match cli.command {
        Command::Run(args) => commands::run(*args),
        Command::Evaluate { problem, file, corpus } => commands::evaluate(&problem, file.as_deref(), corpus.as_deref()),
        Command::Verify { kind, file, n, w, m } => commands::verify(kind, &file, n, w, m),
        Command::Bound { s, n, w, m } => commands::bound(s, n, w, &m),
        Command::GenData { dataset, seed, instances, items, out } => commands::gen_data(dataset, seed, instances, items, &out),
        Command::Replay { db, top } => commands::replay(&db, top),
        Command::Xsearch { problem, file, batch_size, k_stall, top_k, temperature, seed, out } => {
            let cfg = spacevolve::XSearchConfig { batch_size, k_stall, top_k, temperature, seed, ..Default::default() };
            commands::xsearch(&problem, &file, cfg, out.as_deref())
        }
        Command::Corpus { name } => commands::corpus(name.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
