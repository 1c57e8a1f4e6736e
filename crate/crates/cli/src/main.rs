use std::process::ExitCode;

use clap::Parser;
use ising_chain_cli::{emit, execute, Cli};

fn main() -> ExitCode {
    let result = execute(Cli::parse()).and_then(|out| emit(out.path.as_deref(), &out.text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
