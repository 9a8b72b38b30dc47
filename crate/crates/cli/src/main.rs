use std::process::ExitCode;

use clap::Parser;
use tat_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, strict)) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(outcome.exit_code(strict) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
