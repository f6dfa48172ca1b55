//! `qad`: feature extraction, training, scoring and benchmarks from the
//! command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
//! degeneracy.

mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;
use qad_core::ErrorKind;

use args::{Cli, Command};

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Usage => 1,
        ErrorKind::Data => 2,
        ErrorKind::Numerical => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let seed = cli.seed;
    let result = match &cli.command {
        Command::Features(a) => commands::features(a),
        Command::Train(a) => commands::train(a),
        Command::Score(a) => commands::score(a, seed),
        Command::Eval(a) => commands::eval(a, seed),
        Command::Heatmap(a) => commands::heatmap_cmd(a),
        Command::Tomography(a) => commands::tomography(a, seed),
        Command::Bench(a) => commands::bench(a, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
