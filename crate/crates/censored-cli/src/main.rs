//! `censored` — command-line front end for the censored nonlocal operator
//! laboratory.
//!
//! One subcommand per module operation family:
//!
//! * `special`  — normalization constant, `psi(p, t)` family, `a(p)`;
//! * `apply`    — pointwise operator evaluation on a named field;
//! * `solve`    — Dirichlet collocation solve with report;
//! * `mc`       — Feynman–Kac jump-diffusion estimates;
//! * `barrier`  — boundary barrier construction and certification;
//! * `analyze`  — boundary expansion fit, oscillation decay, linearity,
//!   weighted norms;
//! * `selftest` — exact-oracle suite with pass/fail rows.
//!
//! Each subcommand reads a key–value config (path argument, or stdin when
//! the path is absent or `-`) and writes `#`-headed comma-separated text.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric non-convergence,
//! 4 certification or self-test failure.

mod config;
mod output;
mod selector;
mod tasks;

use clap::{Parser, Subcommand};
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "censored",
    version,
    about = "Numerical laboratory for the isotropically censored nonlocal operator"
)]
struct Cli {
    /// Worker threads for parallel sections. Results are deterministic at
    /// any count; 1 is the reference setting.
    #[arg(long, default_value_t = 1, global = true)]
    workers: usize,

    /// Print the wall-clock duration to stderr when done.
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    task: Task,
}

#[derive(Subcommand)]
enum Task {
    /// Special-function values: normalization constant, psi(p, t), a(p)
    Special { config: Option<PathBuf> },
    /// Apply the operator pointwise to a named field
    Apply { config: Option<PathBuf> },
    /// Solve the Dirichlet problem on a graded grid
    Solve { config: Option<PathBuf> },
    /// Estimate Dirichlet solutions by the jump-diffusion sampler
    Mc { config: Option<PathBuf> },
    /// Build and certify a boundary barrier
    Barrier { config: Option<PathBuf> },
    /// Boundary regularity reports: expansion fit, oscillation, linearity,
    /// weighted norms
    Analyze { config: Option<PathBuf> },
    /// Run the exact-oracle suite and print pass/fail per item
    Selftest { config: Option<PathBuf> },
}

impl Task {
    fn name(&self) -> &'static str {
        match self {
            Task::Special { .. } => "special",
            Task::Apply { .. } => "apply",
            Task::Solve { .. } => "solve",
            Task::Mc { .. } => "mc",
            Task::Barrier { .. } => "barrier",
            Task::Analyze { .. } => "analyze",
            Task::Selftest { .. } => "selftest",
        }
    }

    fn config_path(&self) -> Option<&PathBuf> {
        match self {
            Task::Special { config }
            | Task::Apply { config }
            | Task::Solve { config }
            | Task::Mc { config }
            | Task::Barrier { config }
            | Task::Analyze { config }
            | Task::Selftest { config } => config.as_ref(),
        }
    }
}

/// Run failure with its process exit code.
pub enum RunError {
    /// Config violations: every problem found, reported together. Exit 2.
    Config(Vec<String>),
    /// Library error, mapped onto an exit code by kind.
    Lib(censored::Error),
    /// I/O failure (config or output file). Exit 2.
    Io(String),
}

impl From<censored::Error> for RunError {
    fn from(e: censored::Error) -> Self {
        RunError::Lib(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

fn exit_code_for(e: &RunError) -> u8 {
    use censored::Error::*;
    match e {
        RunError::Config(_) | RunError::Io(_) => 2,
        RunError::Lib(le) => match le {
            InvalidParameter(_)
            | OutsideDomain { .. }
            | MissingDerivatives(_)
            | UnsupportedDomain { .. } => 2,
            NoConvergence { .. } | LinearSolve(_) => 3,
            Certification(_) => 4,
        },
    }
}

fn read_config_text(path: Option<&PathBuf>) -> Result<String, RunError> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| RunError::Io(format!("cannot read config {}: {e}", p.display()))),
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| RunError::Io(format!("cannot read config from stdin: {e}")))?;
            Ok(text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.workers == 0 {
        eprintln!("config error: --workers must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build_global()
    {
        eprintln!("error: cannot build worker pool: {e}");
        return ExitCode::from(2);
    }

    let started = Instant::now();
    let task_name = cli.task.name();

    let outcome = read_config_text(cli.task.config_path()).and_then(|text| {
        let cfg = config::Config::parse(&text);
        match &cli.task {
            Task::Special { .. } => tasks::special::run(cfg),
            Task::Apply { .. } => tasks::apply::run(cfg),
            Task::Solve { .. } => tasks::solve::run(cfg),
            Task::Mc { .. } => tasks::mc::run(cfg),
            Task::Barrier { .. } => tasks::barrier::run(cfg),
            Task::Analyze { .. } => tasks::analyze::run(cfg),
            Task::Selftest { .. } => tasks::selftest::run(cfg),
        }
    });

    if cli.timings {
        eprintln!("{task_name}: {:.3}s", started.elapsed().as_secs_f64());
    }

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            match &e {
                RunError::Config(violations) => {
                    for v in violations {
                        eprintln!("config error: {v}");
                    }
                }
                RunError::Lib(le) => eprintln!("error: {le}"),
                RunError::Io(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(exit_code_for(&e))
        }
    }
}
