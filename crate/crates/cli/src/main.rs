//! `boxrecycle` command-line tool.

mod commands;
mod failure;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "boxrecycle",
    version,
    about = "KITTI evaluation, MOL labels and box augmentation"
)]
pub struct Cli {
    /// Worker threads for per-frame work. Output does not depend on it.
    #[arg(long, global = true, env = "BOXRECYCLE_JOBS")]
    pub jobs: Option<usize>,

    /// Where to write the run manifest instead of the command's default.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Only log errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score detections against ground truth and write report.json and table.txt.
    Evaluate(commands::evaluate::Args),
    /// Write random-window MOL labels as JSON Lines.
    Mol(commands::mol::Args),
    /// Write an augmented copy of a split in KITTI layout.
    Augment(commands::augment::Args),
    /// Print class frequencies and inverse-frequency weights of a split.
    Stats(commands::stats::Args),
    /// Draw projected cuboids and a bird's-eye panel over one frame.
    Render(commands::render::Args),
    /// Re-run the command recorded in a run manifest.
    Replay(commands::replay::Args),
}

fn init_logging(cli: &Cli) {
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        (false, _) => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    init_logging(&cli);

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(jobs);
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };

    match pool.install(|| commands::run(&cli, &argv)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            ExitCode::from(failure.code())
        }
    }
}
