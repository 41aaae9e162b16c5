use std::process::ExitCode;

use clap::Parser;
use gsvkit_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            println!("{}", report.to_json());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("gsvkit: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
