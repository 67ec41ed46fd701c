use std::process::ExitCode;

use clap::Parser;
use mfc_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("mfc: {err}");
            if let Some(path) = err.report() {
                println!("{}", path.display());
            }
            ExitCode::from(err.code())
        }
    }
}
