#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;
mod manifest;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use crate::args::Cli;
use crate::error::{CliError, CliResult};

fn run(argv: Vec<String>) -> CliResult<serde_json::Value> {
    let argv = config::expand(argv)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    commands::execute(cli.command)
}

fn main() -> ExitCode {
    let argv: Result<Vec<String>, _> = std::env::args_os().map(|a| a.into_string()).collect();
    let result = argv
        .map_err(|_| CliError::Usage("arguments must be valid UTF-8".into()))
        .and_then(run);
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tripsim: {e}");
            println!(
                "{}",
                json!({ "status": "error", "category": e.category(), "message": e.to_string() })
            );
            ExitCode::from(e.exit_code())
        }
    }
}
