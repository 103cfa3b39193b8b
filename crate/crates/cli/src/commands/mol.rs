use std::io::BufWriter;
use std::path::PathBuf;

use boxrecycle::ssl_mol::{generate_mol_dataset, write_jsonl, MolConfig, MolFrame};
use boxrecycle::ClassId;

use super::{missing_frames_failure, new_recorder, open_split, parse_class};
use crate::failure::{Classify, CliResult};
use crate::manifest::Recorder;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// KITTI root containing image_2/, label_2/ and calib/.
    pub root: PathBuf,
    /// File listing one frame id per line.
    pub split: PathBuf,
    /// Output JSON Lines file.
    #[arg(long)]
    pub out: PathBuf,
    /// Random windows per frame.
    #[arg(long, default_value_t = 16, value_parser = parse_windows)]
    pub windows: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Smallest window side as a fraction of the image side.
    #[arg(long, default_value_t = 0.1)]
    pub scale_min: f64,
    /// Largest window side as a fraction of the image side.
    #[arg(long, default_value_t = 0.9)]
    pub scale_max: f64,
    /// Redraw windows that contain no object.
    #[arg(long)]
    pub require_foreground: bool,
    #[arg(long, default_value_t = 50)]
    pub max_retries: u32,
    #[arg(long, value_delimiter = ',', value_parser = parse_class, default_value = "Car,Pedestrian,Cyclist")]
    pub classes: Vec<ClassId>,
}

fn parse_windows(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("need at least one window per frame".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

pub fn run(args: &Args, argv: &[String]) -> CliResult<Recorder> {
    let cfg = MolConfig {
        n_windows: args.windows,
        scale_range: (args.scale_min, args.scale_max),
        require_foreground: args.require_foreground,
        max_retries: args.max_retries,
        seed: args.seed,
    };
    cfg.validate().bad_input()?;
    let (dataset, ids) = open_split(&args.root, &args.split)?;

    let load = |id: &str| {
        let (width, height) = dataset.image_dims(id)?;
        Ok(MolFrame {
            width,
            height,
            objects: dataset.load_labels(id)?,
        })
    };
    let output = generate_mol_dataset(&ids, load, &args.classes, &cfg).bad_input()?;
    if !output.errors.is_empty() {
        for (id, e) in &output.errors {
            log::error!("{id}: {e}");
        }
        let ids: Vec<&str> = output.errors.iter().map(|(id, _)| id.as_str()).collect();
        return Err(missing_frames_failure("frames could not be read", &ids));
    }

    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).internal()?;
    }
    let file = std::fs::File::create(&args.out).internal()?;
    write_jsonl(&output.records, BufWriter::new(file)).internal()?;
    log::info!("wrote {} records for {} frames", output.records.len(), ids.len());

    let mut recorder = new_recorder("mol", argv);
    recorder
        .config(&cfg)
        .seed(cfg.seed)
        .input(&args.root)
        .input(&args.split)
        .output(&args.out);
    Ok(recorder)
}
