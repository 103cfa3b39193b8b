use std::collections::BTreeMap;
use std::path::PathBuf;

use boxrecycle::metrics::{class_frequencies, icfw_weights};
use boxrecycle::{ClassId, Error, Object3D};
use rayon::prelude::*;
use serde::Serialize;

use super::{new_recorder, open_split, parse_class};
use crate::failure::{Classify, CliResult};
use crate::manifest::Recorder;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// KITTI root containing image_2/, label_2/ and calib/.
    pub root: PathBuf,
    /// File listing one frame id per line.
    pub split: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = parse_class, default_value = "Car,Pedestrian,Cyclist")]
    pub classes: Vec<ClassId>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct ClassStats {
    class: ClassId,
    count: usize,
    frequency: f64,
    weight: Option<f64>,
}

pub fn run(args: &Args, argv: &[String]) -> CliResult<Recorder> {
    let (dataset, ids) = open_split(&args.root, &args.split)?;
    let labels: Vec<Vec<Object3D>> = ids
        .par_iter()
        .map(|id| dataset.load_labels(id))
        .collect::<boxrecycle::Result<_>>()
        .bad_input()?;

    let freq = class_frequencies(labels.iter().map(Vec::as_slice), &args.classes).bad_input()?;
    let weights = match icfw_weights(&freq) {
        Ok(w) => Some(w.weight().clone()),
        Err(e @ Error::ZeroFrequency(_)) => {
            log::warn!("{e}; weights left undefined");
            None
        }
        Err(e) => return Err(e).bad_input(),
    };
    let mut counts: BTreeMap<&ClassId, usize> = args.classes.iter().map(|c| (c, 0)).collect();
    for obj in labels.iter().flatten() {
        if let Some(n) = counts.get_mut(&obj.class) {
            *n += 1;
        }
    }
    let rows: Vec<ClassStats> = args
        .classes
        .iter()
        .map(|c| ClassStats {
            class: c.clone(),
            count: counts[c],
            frequency: freq[c],
            weight: weights.as_ref().map(|w| w[c]),
        })
        .collect();

    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows).internal()?);
    } else {
        println!("{:<12} {:>8} {:>8} {:>8}", "class", "count", "f_c", "w_c");
        for row in &rows {
            let weight = row.weight.map_or_else(|| "n/a".to_string(), |w| format!("{w:.4}"));
            println!(
                "{:<12} {:>8} {:>8.4} {:>8}",
                row.class.to_string(),
                row.count,
                row.frequency,
                weight
            );
        }
        println!("frames: {}", ids.len());
    }

    let mut recorder = new_recorder("stats", argv);
    recorder.config(&args.classes).input(&args.root).input(&args.split);
    Ok(recorder)
}
