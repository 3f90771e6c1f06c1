mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Experiments on escape from mixed identities in linear groups.
#[derive(Parser, Debug)]
#[command(name = "mifkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags every subcommand accepts.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Group-spec JSON file; the free pair (or the A_s/B family for `ssa`) when absent.
    #[arg(long)]
    pub group: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output file; a `<out>.manifest.json` is written beside it. Stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Reduced sample counts and prime ranges.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Heights of a polynomial, or the height property suites with --selftest.
    Heights(commands::HeightsArgs),
    /// Exhaustive zero count of a polynomial over F_p^t.
    Zeros(commands::ZerosArgs),
    /// Closure orders and spectral gaps over a range of primes.
    Gap(commands::GapArgs),
    /// Empirical Pr(w(γ_k) = 1) against the walk length k.
    Decay(commands::DecayArgs),
    /// A certified witness γ with w(γ) ≠ 1.
    Escape(commands::EscapeArgs),
    /// Witness lengths against word length, checked by the ball oracle.
    Fx(commands::FxArgs),
    /// One witness for every nontrivial word of length at most n.
    Phi(commands::PhiArgs),
    /// Exhaustive specializations of a parametric group.
    Ssa(commands::SsaArgs),
    /// All property suites.
    Selftest(commands::SelftestArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mifkit_core::Error),
    #[error("{path}: {1}", path = .0.display())]
    Io(PathBuf, std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_capacity() => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Heights(a) => commands::heights(a),
        Command::Zeros(a) => commands::zeros(a),
        Command::Gap(a) => commands::gap(a),
        Command::Decay(a) => commands::decay(a),
        Command::Escape(a) => commands::escape(a),
        Command::Fx(a) => commands::fx(a),
        Command::Phi(a) => commands::phi(a),
        Command::Ssa(a) => commands::ssa(a),
        Command::Selftest(a) => commands::selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mifkit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
