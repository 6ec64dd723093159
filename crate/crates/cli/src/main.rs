//! `encctl`: key generation, security games, reductions and the
//! eavesdropper demo from the command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 runtime error.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CommonArgs, FileConfig, Settings};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Runtime(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl From<encctl_core::Error> for CliError {
    fn from(e: encctl_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "encctl", version, about = "Encrypted-control security workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a key pair and write it as a versioned JSON key file.
    Keygen(CommonArgs),
    /// Estimate an adversary's IND-CPA advantage.
    RunCpa(CommonArgs),
    /// Estimate an adversary's IND-PEA advantage against an encrypted controller.
    RunPea(CommonArgs),
    /// Compare an adversary's advantage directly and through a reduction wrapper.
    Reduce(ReduceArgs),
    /// Least-squares gain recovery from plaintext vs. ciphertext traffic.
    DemoEavesdrop(DemoArgs),
}

#[derive(Debug, Args)]
struct ReduceArgs {
    /// pea-to-cpa | cpa-to-pea
    #[arg(long)]
    direction: Option<String>,
    /// How to map vector challenges to scalars for pea-to-cpa: strict | first-component
    #[arg(long)]
    collapse: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// Number of observed (y, u) samples.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Keygen(args) => commands::keygen(&Settings::merge(&args, FileConfig::default())?),
        Command::RunCpa(args) => commands::run_cpa(&Settings::merge(&args, FileConfig::default())?),
        Command::RunPea(args) => commands::run_pea(&Settings::merge(&args, FileConfig::default())?),
        Command::Reduce(args) => {
            let extra = FileConfig {
                direction: args.direction,
                collapse: args.collapse,
                ..FileConfig::default()
            };
            commands::reduce(&Settings::merge(&args.common, extra)?)
        }
        Command::DemoEavesdrop(args) => {
            let extra = FileConfig {
                samples: args.samples,
                ..FileConfig::default()
            };
            commands::demo_eavesdrop(&Settings::merge(&args.common, extra)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("encctl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
