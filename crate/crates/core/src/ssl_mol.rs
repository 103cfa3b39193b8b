//! Multi-object labeling (MOL) pretext targets.
//!
//! A random window is cut from the image and labeled with the fraction of its
//! area covered by each class's 2D ground-truth boxes; whatever is left is
//! background. Windows come from a keyed RNG, so a window depends only on
//! `(seed, frame_id, index)`.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kitti_io::{BBox2D, ClassId, Object3D};
use crate::rng::keyed_rng;

const RNG_STREAM: &str = "mol-window";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MolConfig {
    pub n_windows: usize,
    /// Window side as a fraction of the image side, drawn uniformly per axis.
    pub scale_range: (f64, f64),
    /// Redraw windows that cover no object, up to `max_retries` times.
    pub require_foreground: bool,
    pub max_retries: u32,
    pub seed: u64,
}

impl Default for MolConfig {
    fn default() -> Self {
        Self {
            n_windows: 16,
            scale_range: (0.1, 0.9),
            require_foreground: false,
            max_retries: 50,
            seed: 0,
        }
    }
}

impl MolConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.scale_range;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(Error::Config(format!(
                "scale range ({lo}, {hi}) must satisfy 0 < min <= max <= 1"
            )));
        }
        if self.n_windows == 0 {
            return Err(Error::Config("n_windows must be at least 1".into()));
        }
        Ok(())
    }
}

/// Integer pixel window `[left, right) x [top, bottom)`, fully inside the
/// image and never empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomWindow {
    pub rect: [u32; 4],
    pub frame_id: String,
    pub index: usize,
}

impl RandomWindow {
    pub fn bbox(&self) -> BBox2D {
        let [l, t, r, b] = self.rect.map(f64::from);
        BBox2D::new(l, t, r, b)
    }
}

/// Per-class coverage fractions followed by the background fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftLabel {
    pub proportions: Vec<f64>,
}

impl SoftLabel {
    pub fn background(&self) -> f64 {
        *self.proportions.last().expect("label has a background entry")
    }
}

fn draw_side(rng: &mut impl Rng, extent: u32, (lo, hi): (f64, f64)) -> u32 {
    let frac = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
    ((frac * extent as f64).round() as u32).clamp(1, extent)
}

fn draw_window(rng: &mut impl Rng, (width, height): (u32, u32), scale: (f64, f64)) -> [u32; 4] {
    let w = draw_side(rng, width, scale);
    let h = draw_side(rng, height, scale);
    let left = rng.gen_range(0..=width - w);
    let top = rng.gen_range(0..=height - h);
    [left, top, left + w, top + h]
}

/// Samples `cfg.n_windows` windows for one image.
///
/// `objects` and `classes` are only consulted when `cfg.require_foreground`
/// is set.
pub fn sample_windows(
    image_dims: (u32, u32),
    objects: &[Object3D],
    classes: &[ClassId],
    cfg: &MolConfig,
    frame_id: &str,
) -> Result<Vec<RandomWindow>> {
    cfg.validate()?;
    let (width, height) = image_dims;
    if width == 0 || height == 0 {
        return Err(Error::Frame {
            frame: frame_id.to_string(),
            message: format!("image has zero size {width}x{height}"),
        });
    }
    let windows = (0..cfg.n_windows)
        .map(|index| {
            let mut rng = keyed_rng(cfg.seed, RNG_STREAM, frame_id, &[index as u64]);
            let mut rect = draw_window(&mut rng, image_dims, cfg.scale_range);
            if cfg.require_foreground {
                let mut retries = 0;
                while retries < cfg.max_retries && !has_foreground(rect, objects, classes) {
                    rect = draw_window(&mut rng, image_dims, cfg.scale_range);
                    retries += 1;
                }
            }
            RandomWindow {
                rect,
                frame_id: frame_id.to_string(),
                index,
            }
        })
        .collect();
    Ok(windows)
}

fn has_foreground(rect: [u32; 4], objects: &[Object3D], classes: &[ClassId]) -> bool {
    let [l, t, r, b] = rect.map(f64::from);
    let window = BBox2D::new(l, t, r, b);
    objects
        .iter()
        .filter(|o| classes.contains(&o.class))
        .any(|o| window.intersection(&o.bbox).is_some())
}

/// Exact area of a union of axis-aligned rectangles (coordinate compression).
pub fn union_area(rects: &[BBox2D]) -> f64 {
    let rects: Vec<&BBox2D> = rects.iter().filter(|r| r.area() > 0.0).collect();
    match rects.len() {
        0 => return 0.0,
        1 => return rects[0].area(),
        _ => {}
    }
    let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r.left, r.right]).collect();
    let mut ys: Vec<f64> = rects.iter().flat_map(|r| [r.top, r.bottom]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let mut area = 0.0;
    for xw in xs.windows(2) {
        let cx = 0.5 * (xw[0] + xw[1]);
        let covering: Vec<&&BBox2D> = rects.iter().filter(|r| r.left <= cx && cx < r.right).collect();
        if covering.is_empty() {
            continue;
        }
        for yw in ys.windows(2) {
            let cy = 0.5 * (yw[0] + yw[1]);
            if covering.iter().any(|r| r.top <= cy && cy < r.bottom) {
                area += (xw[1] - xw[0]) * (yw[1] - yw[0]);
            }
        }
    }
    area
}

/// Soft label of `window` over `classes` (objects of other classes, including
/// DontCare, are ignored).
///
/// Each class component is the area of the union of that class's boxes inside
/// the window, divided by the window area. If boxes of different classes
/// overlap so that the class components add up to more than one, they are
/// rescaled to sum to one and the background is zero.
pub fn soft_label(window: &BBox2D, objects: &[Object3D], classes: &[ClassId]) -> SoftLabel {
    let window_area = window.area();
    let mut proportions: Vec<f64> = classes
        .iter()
        .map(|class| {
            if window_area <= 0.0 || *class == ClassId::DontCare {
                return 0.0;
            }
            let clipped: Vec<BBox2D> = objects
                .iter()
                .filter(|o| o.class == *class)
                .filter_map(|o| o.bbox.intersection(window))
                .collect();
            (union_area(&clipped) / window_area).clamp(0.0, 1.0)
        })
        .collect();
    let total: f64 = proportions.iter().sum();
    let background = if total > 1.0 {
        proportions.iter_mut().for_each(|p| *p /= total);
        0.0
    } else {
        1.0 - total
    };
    proportions.push(background);
    SoftLabel { proportions }
}

/// What MOL generation needs from a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MolFrame {
    pub width: u32,
    pub height: u32,
    pub objects: Vec<Object3D>,
}

/// One JSON Lines record: `{"frame", "window": [l, t, r, b], "label": [c.., bg]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MolRecord {
    pub frame: String,
    pub window: [u32; 4],
    pub label: Vec<f64>,
}

#[derive(Debug, Default)]
pub struct MolOutput {
    /// Sorted by frame id, then window index.
    pub records: Vec<MolRecord>,
    /// Frames that failed to load, in frame-id order.
    pub errors: Vec<(String, Error)>,
}

/// Windows and labels for every frame. A frame that fails to load is reported
/// in [`MolOutput::errors`] and skipped.
pub fn generate_mol_dataset<F>(frame_ids: &[String], load: F, classes: &[ClassId], cfg: &MolConfig) -> Result<MolOutput>
where
    F: Fn(&str) -> Result<MolFrame> + Sync,
{
    cfg.validate()?;
    let mut ids: Vec<&String> = frame_ids.iter().collect();
    ids.sort();
    let per_frame: Vec<(String, Result<Vec<MolRecord>>)> = ids
        .par_iter()
        .map(|id| {
            let records = load(id).and_then(|frame| {
                let windows = sample_windows((frame.width, frame.height), &frame.objects, classes, cfg, id)?;
                Ok(windows
                    .into_iter()
                    .map(|w| MolRecord {
                        label: soft_label(&w.bbox(), &frame.objects, classes).proportions,
                        frame: w.frame_id,
                        window: w.rect,
                    })
                    .collect())
            });
            (id.to_string(), records)
        })
        .collect();

    let mut out = MolOutput::default();
    for (id, result) in per_frame {
        match result {
            Ok(records) => out.records.extend(records),
            Err(e) => out.errors.push((id, e)),
        }
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(records: &[MolRecord], mut writer: W) -> std::io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
