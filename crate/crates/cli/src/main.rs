//! `glyphspec` command-line tool.

mod bundle;
mod commands;
mod options;

use std::process::ExitCode;

use clap::Parser;

use options::Cli;

/// Exit status when some inputs were skipped but the rest were processed.
const EXIT_PARTIAL: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or(if cli.global.verbose {
            "debug"
        } else {
            "info"
        }),
    )
    .format_timestamp(None)
    .init();

    match commands::run(cli) {
        Ok(commands::Outcome::Complete) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Partial { skipped }) => {
            log::error!("{skipped} input(s) could not be processed");
            ExitCode::from(EXIT_PARTIAL)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
