use std::process::ExitCode;

use clap::Parser;
use fiadi_cli::{run_experiment, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    match run_experiment(&args) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
