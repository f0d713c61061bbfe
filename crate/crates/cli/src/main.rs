mod args;
mod batch;
mod commands;
mod demo;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Bad flag values detected after parsing. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Tanaka { op } => commands::tanaka(op),
        Command::Skk { op } => commands::skk(op),
        Command::Attack { attack } => commands::attack(attack),
        Command::Metrics(a) => commands::metrics(a),
        Command::Demo(a) => demo::run(a),
        Command::Batch(a) => batch::run(a),
        Command::Keygen(a) => commands::keygen(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
