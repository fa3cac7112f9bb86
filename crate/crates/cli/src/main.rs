mod args;
mod guess_cmd;
mod io;
mod okada_cmd;
mod ore_cmd;
mod tspp_cmd;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use io::{CliError, Report};

fn run(cli: &Cli) -> Result<Report, CliError> {
    cli.global.validate()?;
    match &cli.command {
        Command::Tspp(c) => tspp_cmd::run(c, &cli.global),
        Command::Okada(c) => okada_cmd::run(c, &cli.global),
        Command::Guess(c) => guess_cmd::run(c, &cli.global),
        Command::Ore(c) => ore_cmd::run(c, &cli.global),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            report.emit(cli.global.json);
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            e.emit(cli.global.json);
            ExitCode::from(2)
        }
    }
}
