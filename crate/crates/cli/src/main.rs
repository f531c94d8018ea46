mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    // clap itself exits with status 2 on malformed arguments.
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Search(a) => commands::search(a),
        Command::Verify(a) => commands::verify(a),
        Command::Classify(a) => commands::classify(a),
        Command::Construct(a) => commands::construct(a),
        Command::Zm(a) => commands::zm(a),
        Command::Mub(a) => commands::mub(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("circortho: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
