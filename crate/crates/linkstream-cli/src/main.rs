//! `lstream`: batch CLI over the linkstream library.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.
//! Reports go to stdout; diagnostics go to stderr.

mod commands;
mod synth;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match commands::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli) {
        Ok(payload) => {
            print!("{payload}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.exit_code())
        }
    }
}
