use std::process::ExitCode;

use catlens_cli::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(catlens_cli::commands::run(&cli))
}
