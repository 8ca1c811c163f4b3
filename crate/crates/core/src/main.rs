use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chabauty_core::cli::{emit_report, parse_config, run_job, Format};

#[derive(Parser)]
#[command(name = "chabauty", version, about = "Rational points on rank-one genus-2 curves")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline on a JSON job file.
    Run {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// Override the starting p-adic precision.
        #[arg(long)]
        precision: Option<u32>,
        /// Override the iteration budget.
        #[arg(long = "max-iter")]
        max_iter: Option<u32>,
    },
}

fn main() -> ExitCode {
    let Command::Run { config, format, precision, max_iter } = Args::parse().command;
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config.display());
            return ExitCode::from(1);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(p) = precision {
        cfg.precision = p;
    }
    if let Some(k) = max_iter {
        cfg.budgets.iterations = k;
    }
    let report = run_job(&cfg);
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    print!("{}", emit_report(&report, format));
    ExitCode::from(report.exit_code() as u8)
}
