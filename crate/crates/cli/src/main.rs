use std::process::ExitCode;

use clap::Parser;
use fkg_cli::{run, RunConfig, EXIT_INPUT};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let (report, status) = match run(&config) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let json = report.to_json();
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json) {
                eprintln!("error: --output: {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT);
            }
        }
        None => print!("{json}"),
    }
    ExitCode::from(status)
}
