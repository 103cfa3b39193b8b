use std::path::PathBuf;

use boxrecycle::geometry::{box3d_corners, footprint, project_keypoints, Corners3D};
use boxrecycle::kitti_io::{parse_label_file, KittiDataset};
use boxrecycle::{Calibration, ClassId, Error, Object3D};
use image::{Rgb, RgbImage};
use imageproc::drawing::{draw_cross_mut, draw_filled_rect_mut, draw_line_segment_mut};
use imageproc::rect::Rect;
use serde::Serialize;

use super::{missing_frames_failure, new_recorder};
use crate::failure::{Classify, CliResult, Failure};
use crate::manifest::Recorder;

const GT_COLOR: Rgb<u8> = Rgb([0, 220, 0]);
const DET_COLOR: Rgb<u8> = Rgb([255, 40, 40]);
const PANEL_BG: Rgb<u8> = Rgb([30, 30, 30]);
const GRID_COLOR: Rgb<u8> = Rgb([70, 70, 70]);
const EGO_COLOR: Rgb<u8> = Rgb([240, 240, 240]);

#[derive(Debug, clap::Args)]
pub struct Args {
    /// KITTI root containing image_2/, label_2/ and calib/.
    pub root: PathBuf,
    /// Frame id, e.g. 000123.
    pub frame: String,
    /// Output PNG.
    #[arg(long)]
    pub out: PathBuf,
    /// Detection label file drawn on top of the ground truth.
    #[arg(long)]
    pub det: Option<PathBuf>,
    /// Leave out the ground-truth boxes.
    #[arg(long)]
    pub no_gt: bool,
    /// Forward depth in meters covered by the bird's-eye panel.
    #[arg(long, default_value_t = 80.0)]
    pub bev_range: f64,
}

#[derive(Debug, Default, Serialize)]
struct Summary {
    drawn: usize,
    skipped: usize,
}

struct Layer {
    objects: Vec<Object3D>,
    color: Rgb<u8>,
}

fn drawable(obj: &Object3D) -> bool {
    obj.class != ClassId::DontCare && !obj.dims.is_sentinel()
}

/// Segment drawing with both ends kept near the canvas, so boxes that
/// project far away do not turn into very long rasterizations.
fn segment(canvas: &mut RgbImage, a: [f64; 2], b: [f64; 2], color: Rgb<u8>) {
    let reach = 4.0 * canvas.width().max(canvas.height()) as f64;
    if a.iter().chain(&b).any(|v| !v.is_finite() || v.abs() > reach) {
        return;
    }
    draw_line_segment_mut(canvas, (a[0] as f32, a[1] as f32), (b[0] as f32, b[1] as f32), color);
}

fn draw_cuboid(canvas: &mut RgbImage, kp: &[[f64; 2]; 9], color: Rgb<u8>) {
    for (i, j) in Corners3D::EDGES {
        segment(canvas, kp[i], kp[j], color);
    }
    // Front face diagonals mark the heading.
    segment(canvas, kp[0], kp[5], color);
    segment(canvas, kp[1], kp[4], color);
    let [cx, cy] = kp[8];
    if cx.abs() < 1e6 && cy.abs() < 1e6 {
        draw_cross_mut(canvas, color, cx.round() as i32, cy.round() as i32);
    }
}

/// Square bird's-eye panel, camera at the bottom center looking up.
fn bev_panel(size: u32, range: f64, layers: &[Layer]) -> RgbImage {
    let mut panel = RgbImage::from_pixel(size, size, PANEL_BG);
    let scale = size as f64 / range;
    let to_px = |[x, z]: [f64; 2]| [size as f64 / 2.0 + x * scale, size as f64 - z * scale];
    let mut z = 10.0;
    while z < range {
        let y = (size as f64 - z * scale) as f32;
        draw_line_segment_mut(&mut panel, (0.0, y), (size as f32, y), GRID_COLOR);
        z += 10.0;
    }
    let mid = size as f32 / 2.0;
    draw_line_segment_mut(&mut panel, (mid, 0.0), (mid, size as f32), GRID_COLOR);
    for layer in layers {
        for obj in layer.objects.iter().filter(|o| drawable(o)) {
            let poly = footprint(obj);
            let v = poly.vertices();
            for i in 0..v.len() {
                segment(&mut panel, to_px(v[i]), to_px(v[(i + 1) % v.len()]), layer.color);
            }
            if let Some(front) = v.first().zip(v.get(1)) {
                let nose = [(front.0[0] + front.1[0]) / 2.0, (front.0[1] + front.1[1]) / 2.0];
                let [x, _, z] = obj.location;
                segment(&mut panel, to_px([x, z]), to_px(nose), layer.color);
            }
        }
    }
    let ego = size.saturating_sub(4) as i32;
    draw_filled_rect_mut(&mut panel, Rect::at(mid as i32 - 3, ego).of_size(7, 4), EGO_COLOR);
    panel
}

fn render(image: &RgbImage, calib: &Calibration, layers: &[Layer], bev_range: f64) -> (RgbImage, Summary) {
    let (w, h) = image.dimensions();
    let mut canvas = RgbImage::from_pixel(w + h, h, PANEL_BG);
    let mut summary = Summary::default();
    let mut view = image.clone();
    for layer in layers {
        for (index, obj) in layer.objects.iter().enumerate().filter(|(_, o)| drawable(o)) {
            match project_keypoints(&box3d_corners(obj), calib) {
                Ok(kp) => {
                    draw_cuboid(&mut view, &kp, layer.color);
                    summary.drawn += 1;
                }
                Err(Error::BehindCamera { z, .. }) => {
                    log::warn!("skipping {} #{index}: keypoint behind the camera (z = {z})", obj.class);
                    summary.skipped += 1;
                }
                Err(e) => {
                    log::warn!("skipping {} #{index}: {e}", obj.class);
                    summary.skipped += 1;
                }
            }
        }
    }
    image::imageops::replace(&mut canvas, &view, 0, 0);
    image::imageops::replace(&mut canvas, &bev_panel(h, bev_range, layers), w as i64, 0);
    (canvas, summary)
}

pub fn run(args: &Args, argv: &[String]) -> CliResult<Recorder> {
    if !args.bev_range.is_finite() || args.bev_range <= 0.0 {
        return Err(Failure::bad_input("--bev-range must be positive"));
    }
    let dataset = KittiDataset::new(&args.root);
    let image_path = dataset.image_path(&args.frame);
    let calib_path = dataset.calib_path(&args.frame);
    if !image_path.is_file() || !calib_path.is_file() {
        return Err(missing_frames_failure(
            "frames without image or calibration",
            &[&args.frame],
        ));
    }
    let calib = dataset.load_calib(&args.frame).bad_input()?;
    let mut layers = Vec::new();
    if !args.no_gt && dataset.label_path(&args.frame).is_file() {
        layers.push(Layer {
            objects: dataset.load_labels(&args.frame).bad_input()?,
            color: GT_COLOR,
        });
    }
    if let Some(det) = &args.det {
        let text = std::fs::read_to_string(det)
            .map_err(|e| Failure::bad_input(format!("cannot read {}: {e}", det.display())))?;
        layers.push(Layer {
            objects: parse_label_file(&text)
                .map_err(|e| anyhow::anyhow!("{}: {e}", det.display()))
                .bad_input()?,
            color: DET_COLOR,
        });
    }

    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).internal()?;
    }
    let summary = if layers.iter().all(|l| !l.objects.iter().any(drawable)) {
        std::fs::copy(&image_path, &args.out).internal()?;
        Summary::default()
    } else {
        let image = dataset.load_image(&args.frame).bad_input()?;
        let (canvas, summary) = render(&image, &calib, &layers, args.bev_range);
        canvas.save_with_format(&args.out, image::ImageFormat::Png).internal()?;
        summary
    };
    println!("drawn {} boxes, skipped {}", summary.drawn, summary.skipped);

    let mut recorder = new_recorder("render", argv);
    recorder
        .config(&summary)
        .input(&image_path)
        .input(&calib_path)
        .output(&args.out);
    if let Some(det) = &args.det {
        recorder.input(det);
    }
    Ok(recorder)
}
