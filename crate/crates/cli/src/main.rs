mod commands;
mod render;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::{Cli, CliError};

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_MALFORMED: u8 = 4;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Ok(threads) = std::env::var("NONLOCAL_CUBES_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("NONLOCAL_CUBES_THREADS must be a positive integer");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    match commands::run(cli) {
        Ok(outcome) => ExitCode::from(match outcome {
            commands::Outcome::Pass => EXIT_OK,
            commands::Outcome::Refuted => EXIT_REFUTED,
            commands::Outcome::Undecided => EXIT_UNDECIDED,
        }),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Malformed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_MALFORMED)
        }
    }
}
