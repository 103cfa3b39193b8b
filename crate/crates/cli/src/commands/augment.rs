use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use boxrecycle::augment::{compose, AugmentConfig, AugmentKind, Fill, FramePool, PartnerPolicy};
use boxrecycle::kitti_io::KittiDataset;
use boxrecycle::{Error, FrameSample};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use super::{new_recorder, open_split};
use crate::failure::{Classify, CliResult, Failure};
use crate::manifest::Recorder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FillArg {
    Zero,
    Mean,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// KITTI root containing image_2/, label_2/ and calib/.
    pub root: PathBuf,
    /// File listing one frame id per line; also the partner pool.
    pub split: PathBuf,
    /// Output directory, written in KITTI layout.
    #[arg(long)]
    pub out: PathBuf,
    /// Augmentations applied left to right, comma separated
    /// (boxmixup, cutpaste, cutout).
    #[arg(long, value_delimiter = ',', value_parser = parse_kind, required = true)]
    pub pipeline: Vec<AugmentKind>,
    /// Cutout holes per image.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub holes: u32,
    /// Cutout hole side as a fraction of the image side.
    #[arg(long, default_value_t = 0.1)]
    pub hole_frac: f64,
    #[arg(long, value_enum, default_value = "zero")]
    pub fill: FillArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_kind(s: &str) -> Result<AugmentKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Serialize)]
struct Provenance<'a> {
    output_frame: &'a str,
    sources: Vec<&'a str>,
    pipeline: &'a [AugmentKind],
    seed: u64,
}

/// Split frames read from disk on demand; sizes come from PNG headers.
struct DatasetPool<'a> {
    dataset: &'a KittiDataset,
    entries: Vec<(String, (u32, u32))>,
}

impl FramePool for DatasetPool<'_> {
    fn entries(&self) -> Vec<(String, (u32, u32))> {
        self.entries.clone()
    }

    fn load(&self, frame_id: &str) -> boxrecycle::Result<FrameSample> {
        self.dataset.load_frame(frame_id)
    }
}

fn augment_frame(
    dataset: &KittiDataset,
    pool: &DatasetPool,
    out: &KittiDataset,
    id: &str,
    cfg: &AugmentConfig,
) -> CliResult<usize> {
    let frame = dataset.load_frame(id).bad_input()?;
    let composed = compose(&frame, pool, cfg).bad_input()?;
    out.write_image_and_labels(&composed.sample).internal()?;
    std::fs::copy(dataset.calib_path(id), out.calib_path(id)).internal()?;

    let mut sources = vec![id];
    sources.extend(composed.partners.iter().map(String::as_str));
    let provenance = Provenance {
        output_frame: id,
        sources,
        pipeline: &cfg.pipeline,
        seed: cfg.seed,
    };
    let path = provenance_path(out.root(), id);
    let mut json = serde_json::to_string_pretty(&provenance).internal()?;
    json.push('\n');
    std::fs::write(path, json).internal()?;
    Ok(composed.sample.objects.len())
}

fn provenance_path(root: &Path, id: &str) -> PathBuf {
    root.join("provenance").join(format!("{id}.json"))
}

pub fn run(args: &Args, argv: &[String]) -> CliResult<Recorder> {
    let cfg = AugmentConfig {
        pipeline: args.pipeline.clone(),
        cutout_holes: args.holes,
        cutout_frac: args.hole_frac,
        fill: match args.fill {
            FillArg::Zero => Fill::Zero,
            FillArg::Mean => Fill::ChannelMean,
        },
        seed: args.seed,
        partner_policy: PartnerPolicy::UniformSameDims,
    };
    cfg.validate().bad_input()?;
    let (dataset, ids) = open_split(&args.root, &args.split)?;
    if dataset.root().canonicalize().ok() == args.out.canonicalize().ok() {
        return Err(Failure::bad_input("output directory must differ from the dataset root"));
    }

    let entries = ids
        .par_iter()
        .map(|id| dataset.image_dims(id).map(|dims| (id.clone(), dims)))
        .collect::<boxrecycle::Result<Vec<_>>>()
        .bad_input()?;
    let pool = DatasetPool {
        dataset: &dataset,
        entries,
    };

    let out = KittiDataset::new(&args.out);
    for sub in ["image_2", "label_2", "calib", "provenance"] {
        std::fs::create_dir_all(args.out.join(sub)).internal()?;
    }
    let results: BTreeMap<&str, CliResult<usize>> = ids
        .par_iter()
        .map(|id| (id.as_str(), augment_frame(&dataset, &pool, &out, id, &cfg)))
        .collect();
    let mut objects = 0;
    for (id, result) in results {
        match result {
            Ok(n) => objects += n,
            Err(Failure::BadInput(e)) => return Err(Failure::BadInput(e.context(format!("frame {id}")))),
            Err(Failure::Internal(e)) => return Err(Failure::Internal(e.context(format!("frame {id}")))),
        }
    }
    let mut split = ids.join("\n");
    split.push('\n');
    let split_path = args.out.join("split.txt");
    std::fs::write(&split_path, split).internal()?;
    log::info!("wrote {} frames with {objects} objects", ids.len());

    let mut recorder = new_recorder("augment", argv);
    recorder
        .config(&cfg)
        .seed(cfg.seed)
        .input(&args.root)
        .input(&args.split)
        .output(&args.out);
    Ok(recorder)
}
