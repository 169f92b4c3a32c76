use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use smm_gate_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, path)| match path {
        Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io { path, source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("smm-gate: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
