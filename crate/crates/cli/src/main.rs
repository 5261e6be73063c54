mod args;
mod commands;
mod error;
mod manifest;
mod validate;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Resolved};
use error::CliResult;

fn run(cli: Cli) -> CliResult<()> {
    let res = Resolved::new(cli.opts)?;
    match cli.command {
        Command::Nnd => commands::nnd(&res),
        Command::Laplace => commands::laplace(&res),
        Command::Coverage => commands::coverage(&res),
        Command::Optimize => commands::optimize(&res),
        Command::Simulate {
            quantity,
            theta,
            sampler,
        } => commands::simulate(&res, quantity, theta, sampler),
        Command::Validate => validate::validate(&res),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fincov: {e}");
            e.exit_code()
        }
    }
}
