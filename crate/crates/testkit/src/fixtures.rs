use std::fs;
use std::path::{Path, PathBuf};

use boxrecycle::{BBox2D, ClassId, Dims, Object3D};
use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A box with random size, position (z in front of the camera) and yaw.
pub fn random_box<R: Rng>(rng: &mut R) -> Object3D {
    Object3D::new(
        ClassId::Car,
        BBox2D::new(0.0, 0.0, 1.0, 1.0),
        Dims::new(
            rng.gen_range(0.5..3.0),
            rng.gen_range(0.4..2.5),
            rng.gen_range(0.4..5.0),
        ),
        [
            rng.gen_range(-20.0..20.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(5.0..60.0),
        ],
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}

/// A pair that usually overlaps: the second box is a perturbed copy.
pub fn overlapping_pair<R: Rng>(rng: &mut R) -> (Object3D, Object3D) {
    let a = random_box(rng);
    let mut b = a.clone();
    let reach = a.dims.l.max(a.dims.w);
    b.location[0] += rng.gen_range(-reach..reach) * 0.6;
    b.location[1] += rng.gen_range(-a.dims.h..a.dims.h) * 0.6;
    b.location[2] += rng.gen_range(-reach..reach) * 0.6;
    b.dims = Dims::new(
        a.dims.h * rng.gen_range(0.6..1.5),
        a.dims.w * rng.gen_range(0.6..1.5),
        a.dims.l * rng.gen_range(0.6..1.5),
    );
    b.rotation_y = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    (a, b)
}

fn random_decimal<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> String {
    let v = rng.gen_range(lo..hi);
    match rng.gen_range(0..4) {
        0 => format!("{v:.2}"),
        1 => format!("{v:.6}"),
        2 => format!("{v}"),
        _ => format!("{v:e}"),
    }
}

/// A random but valid KITTI label line with mixed number formatting.
pub fn random_label_line<R: Rng>(rng: &mut R) -> String {
    let class = [
        "Car",
        "Pedestrian",
        "Cyclist",
        "Van",
        "Truck",
        "DontCare",
        "Person_sitting",
    ][rng.gen_range(0..7)];
    let left = rng.gen_range(0.0..1200.0);
    let top = rng.gen_range(0.0..360.0);
    let mut fields = vec![
        class.to_string(),
        random_decimal(rng, 0.0, 1.0),
        rng.gen_range(0..4).to_string(),
        random_decimal(rng, -PI, PI),
        format!("{left:.2}"),
        format!("{top:.2}"),
        format!("{:.2}", left + rng.gen_range(0.0..200.0)),
        format!("{:.2}", top + rng.gen_range(0.0..100.0)),
        random_decimal(rng, 0.0, 4.0),
        random_decimal(rng, 0.0, 3.0),
        random_decimal(rng, 0.0, 10.0),
        random_decimal(rng, -40.0, 40.0),
        random_decimal(rng, -2.0, 3.0),
        random_decimal(rng, 0.0, 80.0),
        random_decimal(rng, -PI, PI),
    ];
    if rng.gen_bool(0.5) {
        fields.push(random_decimal(rng, 0.0, 1.0));
    }
    fields.join(" ")
}

/// A random ground-truth object whose 2D box lies inside `(width, height)`.
pub fn random_object<R: Rng>(rng: &mut R, (width, height): (u32, u32), integer_boxes: bool) -> Object3D {
    let class = [ClassId::Car, ClassId::Pedestrian, ClassId::Cyclist, ClassId::DontCare][rng.gen_range(0..4)].clone();
    let (w, h) = (width as f64, height as f64);
    let mut coord = |lo: f64, hi: f64| {
        let v = rng.gen_range(lo..hi);
        if integer_boxes {
            v.floor()
        } else {
            (v * 100.0).round() / 100.0
        }
    };
    let left = coord(0.0, w - 2.0);
    let top = coord(0.0, h - 2.0);
    let right = coord(left + 1.0, w);
    let bottom = coord(top + 1.0, h);
    let mut o = random_box(rng);
    o.class = class;
    o.bbox = BBox2D::new(left, top, right.max(left + 1.0), bottom.max(top + 1.0));
    o
}

pub fn random_image<R: Rng>(rng: &mut R, (width, height): (u32, u32)) -> RgbImage {
    RgbImage::from_fn(width, height, |_, _| Rgb([rng.gen(), rng.gen(), rng.gen()]))
}

/// Paths of a synthetic dataset written by [`write_dataset`].
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub root: PathBuf,
    pub split: PathBuf,
    pub ids: Vec<String>,
}

/// Writes `frames` frames of `dims` pixels into `root` in KITTI layout with a
/// split file listing all of them.
pub fn write_dataset(root: &Path, frames: usize, dims: (u32, u32), seed: u64) -> SyntheticDataset {
    let mut rng = rng(seed);
    for sub in ["image_2", "label_2", "calib"] {
        fs::create_dir_all(root.join(sub)).unwrap();
    }
    let mut ids = Vec::new();
    for i in 0..frames {
        let id = format!("{i:06}");
        random_image(&mut rng, dims)
            .save(root.join("image_2").join(format!("{id}.png")))
            .unwrap();
        let n = rng.gen_range(0..6);
        let lines: Vec<String> = (0..n)
            .map(|_| boxrecycle::kitti_io::serialize_object(&random_object(&mut rng, dims, false)))
            .collect();
        let mut text = lines.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        fs::write(root.join("label_2").join(format!("{id}.txt")), text).unwrap();
        let (w, h) = dims;
        fs::write(
            root.join("calib").join(format!("{id}.txt")),
            format!(
                "P0: 700 0 {cx} 0 0 700 {cy} 0 0 0 1 0\nP2: 700 0 {cx} 45.0 0 700 {cy} 0.2 0 0 1 0.003\n",
                cx = w as f64 / 2.0,
                cy = h as f64 / 2.0
            ),
        )
        .unwrap();
        ids.push(id);
    }
    let split = root.join("split.txt");
    fs::write(&split, ids.join("\n") + "\n").unwrap();
    SyntheticDataset {
        root: root.to_path_buf(),
        split,
        ids,
    }
}

pub fn write_labels(dir: &Path, id: &str, objects: &[Object3D]) {
    fs::create_dir_all(dir).unwrap();
    fs::write(
        dir.join(format!("{id}.txt")),
        boxrecycle::kitti_io::serialize_label_file(objects),
    )
    .unwrap();
}

/// A box well inside the camera view; `slot` spreads boxes along x.
pub fn placed_object(class: ClassId, slot: usize) -> Object3D {
    let x = slot as f64 * 4.0 - 6.0;
    Object3D::new(
        class,
        BBox2D::new(10.0 + 20.0 * slot as f64, 10.0, 28.0 + 20.0 * slot as f64, 40.0),
        Dims::new(1.5, 1.6, 3.9),
        [x, 1.5, 20.0],
        0.2 * slot as f64,
    )
}
