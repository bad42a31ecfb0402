use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use orbitrsh::pipeline::{self, Command, RunOptions};
use orbitrsh::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Towers,
    CheckBundle,
    CheckRep,
    Decompose,
    Report,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Command {
        match s {
            Sub::Towers => Command::Towers,
            Sub::CheckBundle => Command::CheckBundle,
            Sub::CheckRep => Command::CheckRep,
            Sub::Decompose => Command::Decompose,
            Sub::Report => Command::Report,
        }
    }
}

/// Rokhlin towers and subhomogeneous decompositions for twisted minimal systems.
#[derive(Debug, Parser)]
#[command(name = "orbitrsh", version)]
struct Args {
    #[arg(value_enum)]
    subcommand: Sub,
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for sample evaluation (1 runs sequentially).
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides budgets.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Adds the α^i(Y_k) interval table to the report.
    #[arg(long)]
    emit_intervals: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cmd = Command::from(args.subcommand);
    let report = match std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))
        .and_then(|t| pipeline::parse_config(&t))
    {
        Ok(cfg) => pipeline::run(cmd, &cfg, RunOptions { seed: args.seed, jobs: args.jobs, emit_intervals: args.emit_intervals }),
        Err(e) => pipeline::config_failure(cmd, &e),
    };
    println!("{}", report.to_json());
    if let Some(e) = &report.error {
        eprintln!("orbitrsh: {}", e.message);
    }
    ExitCode::from(report.exit_code as u8)
}
