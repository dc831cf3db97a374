mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Exit, Usage};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::Certify(a) => commands::certify(a),
        Command::EnumerateClassical(a) => commands::enumerate(a),
        Command::FactorCheck(a) => commands::factor_check(a),
        Command::VerifyFamily(a) => commands::verify_family(a),
        Command::CayleyDemo(a) => commands::cayley_demo(a),
    };
    match result {
        Ok(Exit::Ok) => ExitCode::SUCCESS,
        Ok(Exit::Gate(msg)) => {
            eprintln!("quality gate: {msg}");
            ExitCode::from(3)
        }
        Err(e) if e.downcast_ref::<Usage>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
