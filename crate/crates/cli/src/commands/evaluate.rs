use std::path::PathBuf;

use boxrecycle::kitti_io::read_label_dir;
use boxrecycle::metrics::{evaluate_frames, Difficulty, EvalConfig, Interpolation, IouKind};
use boxrecycle::{ClassId, Error};
use clap::ValueEnum;

use super::{missing_frames_failure, new_recorder, parse_class};
use crate::failure::{Classify, CliResult, Failure};
use crate::manifest::Recorder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(name = "2d")]
    TwoD,
    Bev,
    #[value(name = "3d")]
    ThreeD,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpArg {
    R11,
    R40,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DifficultyArg {
    Easy,
    Moderate,
    Hard,
    All,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory of ground-truth label files.
    pub gt_dir: PathBuf,
    /// Directory of detection label files (16 fields, score last).
    pub det_dir: PathBuf,
    /// Output directory for report.json and table.txt.
    #[arg(long)]
    pub out: PathBuf,
    /// IoU a detection must exceed to count as a hit.
    #[arg(long, default_value_t = 0.5)]
    pub iou: f64,
    /// IoU kinds to report, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub kind: Vec<KindArg>,
    #[arg(long, value_enum, default_value = "r40")]
    pub interp: InterpArg,
    #[arg(long, value_enum, default_value = "all")]
    pub difficulty: DifficultyArg,
    #[arg(long, value_delimiter = ',', value_parser = parse_class, default_value = "Car,Pedestrian,Cyclist")]
    pub classes: Vec<ClassId>,
}

impl Args {
    fn config(&self) -> EvalConfig {
        let mut iou_kinds = Vec::new();
        for kind in &self.kind {
            let kinds: &[IouKind] = match kind {
                KindArg::TwoD => &[IouKind::TwoD],
                KindArg::Bev => &[IouKind::Bev],
                KindArg::ThreeD => &[IouKind::ThreeD],
                KindArg::All => &IouKind::ALL,
            };
            for k in kinds {
                if !iou_kinds.contains(k) {
                    iou_kinds.push(*k);
                }
            }
        }
        EvalConfig {
            iou_kinds,
            iou_threshold: self.iou,
            interpolation: match self.interp {
                InterpArg::R11 => Interpolation::R11,
                InterpArg::R40 => Interpolation::R40,
            },
            classes: self.classes.clone(),
            difficulty: match self.difficulty {
                DifficultyArg::Easy => Difficulty::Easy,
                DifficultyArg::Moderate => Difficulty::Moderate,
                DifficultyArg::Hard => Difficulty::Hard,
                DifficultyArg::All => Difficulty::All,
            },
        }
    }
}

pub fn run(args: &Args, argv: &[String]) -> CliResult<Recorder> {
    let cfg = args.config();
    cfg.validate().bad_input()?;
    for dir in [&args.gt_dir, &args.det_dir] {
        if !dir.is_dir() {
            return Err(Failure::bad_input(format!("{} is not a directory", dir.display())));
        }
    }
    let gt = read_label_dir(&args.gt_dir).bad_input()?;
    let det = read_label_dir(&args.det_dir).bad_input()?;
    let report = match evaluate_frames(&gt, &det, &cfg) {
        Ok(report) => report,
        Err(Error::FrameMismatch {
            missing_det,
            missing_gt,
        }) => {
            let mut listing: Vec<String> = missing_det
                .iter()
                .map(|id| format!("{id} (no detection file)"))
                .collect();
            listing.extend(missing_gt.iter().map(|id| format!("{id} (no ground-truth file)")));
            return Err(missing_frames_failure("frames missing on one side", &listing));
        }
        Err(e) => return Err(e).bad_input(),
    };
    for warning in &report.warnings {
        log::warn!("{warning}");
    }

    std::fs::create_dir_all(&args.out).internal()?;
    let report_path = args.out.join("report.json");
    let table_path = args.out.join("table.txt");
    let mut json = serde_json::to_string_pretty(&report).internal()?;
    json.push('\n');
    std::fs::write(&report_path, json).internal()?;
    let table = report.to_table();
    std::fs::write(&table_path, &table).internal()?;
    print!("{table}");

    let mut recorder = new_recorder("evaluate", argv);
    recorder
        .config(&cfg)
        .input(&args.gt_dir)
        .input(&args.det_dir)
        .output(&report_path)
        .output(&table_path);
    Ok(recorder)
}
