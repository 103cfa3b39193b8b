use std::path::PathBuf;

use clap::Parser;

use crate::failure::{Classify, CliResult, Failure};
use crate::manifest;
use crate::{Cli, Command};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
}

/// Re-parses the recorded argument vector and runs it from the recorded
/// working directory. The worker count of the current invocation applies.
pub fn run(args: &Args) -> CliResult {
    let recorded = manifest::read(&args.manifest).bad_input()?;
    let cli = Cli::try_parse_from(&recorded.argv)
        .map_err(|e| Failure::bad_input(format!("recorded arguments no longer parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(Failure::bad_input("manifest records another replay"));
    }
    if !recorded.cwd.as_os_str().is_empty() {
        std::env::set_current_dir(&recorded.cwd)
            .map_err(|e| anyhow::anyhow!("cannot enter {}: {e}", recorded.cwd.display()))
            .bad_input()?;
    }
    log::info!("replaying: {}", recorded.argv.join(" "));
    super::run(&cli, &recorded.argv)
}
