use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use degenerate_poisson_cli::args::Cli;
use degenerate_poisson_cli::{run, CliError};

fn emit(cli: &Cli, text: &str) -> io::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| emit(&cli, &text).map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // a failed verification still produces its report
            if let CliError::Mismatch { report, .. } = &err {
                if let Err(io) = emit(&cli, report) {
                    eprintln!("degpois: i/o error: {io}");
                }
            }
            eprintln!("degpois: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
