pub mod augment;
pub mod evaluate;
pub mod mol;
pub mod render;
pub mod replay;
pub mod stats;

use std::path::{Path, PathBuf};

use boxrecycle::kitti_io::{load_split, KittiDataset};
use boxrecycle::ClassId;

use crate::failure::{Classify, CliResult, Failure};
use crate::manifest::{self, Recorder};
use crate::{Cli, Command};

/// Runs one parsed command line and writes its manifest.
pub fn run(cli: &Cli, argv: &[String]) -> CliResult {
    let (name, default_manifest, recorder) = match &cli.command {
        Command::Replay(args) => return replay::run(args),
        Command::Evaluate(args) => (
            "evaluate",
            Some(args.out.join("manifest.json")),
            evaluate::run(args, argv)?,
        ),
        Command::Mol(args) => ("mol", Some(sibling(&args.out, "manifest.json")), mol::run(args, argv)?),
        Command::Augment(args) => (
            "augment",
            Some(args.out.join("manifest.json")),
            augment::run(args, argv)?,
        ),
        Command::Stats(args) => ("stats", None, stats::run(args, argv)?),
        Command::Render(args) => (
            "render",
            Some(sibling(&args.out, "manifest.json")),
            render::run(args, argv)?,
        ),
    };
    let manifest = recorder.finish();
    match cli.manifest.clone().or(default_manifest) {
        Some(path) => manifest::write(&manifest, &path).internal()?,
        None => log::info!(
            "{name} manifest: {}",
            serde_json::to_string(&manifest).unwrap_or_default()
        ),
    }
    Ok(())
}

/// `out.jsonl` -> `out.jsonl.manifest.json`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

pub(crate) fn new_recorder(command: &str, argv: &[String]) -> Recorder {
    Recorder::new(command, argv)
}

/// Reads a split file and checks that every frame it lists is present.
pub(crate) fn open_split(root: &Path, split: &Path) -> CliResult<(KittiDataset, Vec<String>)> {
    if !root.is_dir() {
        return Err(Failure::bad_input(format!(
            "dataset root {} is not a directory",
            root.display()
        )));
    }
    let text = std::fs::read_to_string(split)
        .map_err(|e| Failure::bad_input(format!("cannot read split file {}: {e}", split.display())))?;
    let ids = load_split(&text)
        .map_err(|e| anyhow::anyhow!("{}: {e}", split.display()))
        .bad_input()?;
    let dataset = KittiDataset::new(root);
    let missing = dataset.missing_frames(&ids);
    if !missing.is_empty() {
        return Err(missing_frames_failure(
            "frames without image, label or calibration",
            &missing,
        ));
    }
    Ok((dataset, ids))
}

pub(crate) fn missing_frames_failure<S: AsRef<str>>(what: &str, ids: &[S]) -> Failure {
    let mut message = format!("{} {what}:", ids.len());
    for id in ids {
        message.push_str("\n  ");
        message.push_str(id.as_ref());
    }
    Failure::bad_input(message)
}

pub(crate) fn parse_class(s: &str) -> Result<ClassId, String> {
    Ok(ClassId::from(s.trim()))
}
