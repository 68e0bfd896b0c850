use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = lexikernel_cli::Cli::parse();
    match lexikernel_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
