#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::{Destination, Outcome};
use config::{parse, Format, Kind};
use error::CliError;

/// Run quantum speed limit experiments from a JSON config.
///
/// Exit status: 0 claim verified, 1 claim violated, 2 invalid input,
/// 3 numerical failure. The environment variable QSL_SEED overrides the
/// config seed.
#[derive(Debug, Parser)]
#[command(name = "qsl", version)]
struct Cli {
    #[arg(value_enum)]
    command: Kind,
    /// Flat JSON experiment config; its "kind" must match the subcommand.
    #[arg(long)]
    config: PathBuf,
    /// Output path prefix, overriding the config's "output".
    #[arg(long)]
    out: Option<String>,
    /// Format for trajectories and tables; reports are always JSON.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&cli.config).map_err(|e| CliError::io(cli.config.display().to_string(), e))?;
    let dest = Destination {
        out: cli.out.clone(),
        format: cli.format,
    };
    match cli.command {
        Kind::RefuteMl => commands::refute_ml(&parse(&text, cli.command)?, &dest),
        Kind::BdGap => commands::bd_gap(&parse(&text, cli.command)?, &dest),
        Kind::Trajectory => commands::trajectory(&parse(&text, cli.command)?, &dest),
        Kind::AlphaTable => commands::alpha_table(&parse(&text, cli.command)?, &dest),
        Kind::ValiditySweep => commands::validity(&parse(&text, cli.command)?, &dest),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!(
                "{}",
                serde_json::json!({ "error": "InvalidArguments", "message": first })
            );
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", serde_json::to_string(&outcome).unwrap_or_default());
            if outcome.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
