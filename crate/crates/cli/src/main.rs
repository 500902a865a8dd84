mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use commands::Guards;
use error::CliError;

const THREADS_ENV: &str = "GUESSWORK_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::invalid(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::invalid(format!("cannot size the thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    configure_threads()?;
    if cli.guards.force_guard {
        eprintln!("warning: --force-guard lifts all resource caps; large inputs may exhaust memory");
    }
    let guards = Guards::from_args(&cli.guards);
    let outcome = commands::run(&cli.command, &guards)?;
    let format = cli.output.format.unwrap_or(match cli.command {
        Command::Verify { .. } => Format::Json,
        _ => Format::Csv,
    });
    let bytes = outcome.table.render(format, cli.output.bits)?;
    output::emit(&bytes, cli.output.out.as_deref())?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
