mod args;
mod commands;
mod error;
mod scan;
mod settings;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliResult;
use settings::Settings;

fn run(cli: &Cli) -> CliResult<()> {
    let settings = Settings::resolve(&cli.common, &cli.command)?;
    match cli.command {
        Command::Steady => commands::steady(&settings),
        Command::Evolve => commands::evolve_cmd(&settings),
        Command::Kraus { .. } => commands::kraus(&settings),
        Command::Choi => commands::choi(&settings),
        Command::Epower => commands::epower(&settings),
        Command::Scan { .. } => commands::scan(&settings),
        Command::OptimalCurve { .. } => commands::optimal_curve(&settings),
        Command::Selftest => commands::selftest(&settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
