//! Box-level augmentations: Box-Mixup, Box-Cut-Paste and Cutout.
//!
//! Pairing augmentations take the union of the partner frame's 2D boxes as a
//! binary mask `M`, then
//!
//! * Box-Mixup: `out = (a + b) / 2` on `M`, `a` elsewhere;
//! * Box-Cut-Paste: `out = b` on `M`, `a` elsewhere.
//!
//! Both return the union of the two label sets and keep `a`'s calibration.
//! The partner's 3D labels are carried over unchanged; `FrameSample::sources`
//! records which frame each object came from.

use image::Rgb;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kitti_io::{FrameSample, Object3D};
use crate::rng::keyed_rng;

/// Binary mask over an image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![false; width as usize * height as usize],
        }
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|v| **v).count()
    }

    /// Sets every pixel whose center lies in `[left, right) x [top, bottom)`.
    fn fill_rect(&mut self, left: f64, top: f64, right: f64, bottom: f64) {
        let (x0, x1) = pixel_span(left, right, self.width);
        let (y0, y1) = pixel_span(top, bottom, self.height);
        for y in y0..y1 {
            let row = y as usize * self.width as usize;
            self.data[row + x0 as usize..row + x1 as usize].fill(true);
        }
    }
}

/// Pixel indices `i` with `lo <= i + 0.5 < hi`, clipped to `[0, extent)`.
fn pixel_span(lo: f64, hi: f64, extent: u32) -> (u32, u32) {
    let clip = |v: f64| v.clamp(0.0, extent as f64) as u32;
    let start = clip((lo - 0.5).ceil());
    let end = clip((hi - 0.5).ceil());
    (start, end.max(start))
}

/// Union of the evaluation-class 2D boxes, rasterized by pixel center.
pub fn boxes_mask(objects: &[Object3D], (width, height): (u32, u32)) -> Mask {
    let mut mask = Mask::new(width, height);
    for obj in objects.iter().filter(|o| o.class.is_eval_class()) {
        let b = &obj.bbox;
        mask.fill_rect(b.left, b.top, b.right, b.bottom);
    }
    mask
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentKind {
    BoxMixup,
    BoxCutPaste,
    Cutout,
}

impl AugmentKind {
    pub fn needs_partner(&self) -> bool {
        matches!(self, AugmentKind::BoxMixup | AugmentKind::BoxCutPaste)
    }
}

impl std::str::FromStr for AugmentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "boxmixup" | "mixup" => Ok(AugmentKind::BoxMixup),
            "boxcutpaste" | "cutpaste" => Ok(AugmentKind::BoxCutPaste),
            "cutout" => Ok(AugmentKind::Cutout),
            other => Err(Error::Config(format!("unknown augmentation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fill {
    Zero,
    ChannelMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartnerPolicy {
    /// Uniform over pool frames of the same image size, excluding the frame
    /// itself.
    UniformSameDims,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub pipeline: Vec<AugmentKind>,
    pub cutout_holes: u32,
    /// Hole side as a fraction of the matching image side.
    pub cutout_frac: f64,
    pub fill: Fill,
    pub seed: u64,
    pub partner_policy: PartnerPolicy,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            pipeline: vec![AugmentKind::BoxMixup],
            cutout_holes: 4,
            cutout_frac: 0.1,
            fill: Fill::Zero,
            seed: 0,
            partner_policy: PartnerPolicy::UniformSameDims,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pipeline.is_empty() {
            return Err(Error::EmptyPipeline);
        }
        if self.cutout_holes == 0 {
            return Err(Error::Config("cutout needs at least one hole".into()));
        }
        if !(self.cutout_frac > 0.0 && self.cutout_frac < 1.0) {
            return Err(Error::Config(format!(
                "cutout fraction {} outside (0, 1)",
                self.cutout_frac
            )));
        }
        Ok(())
    }
}

fn check_dims(a: &FrameSample, b: &FrameSample) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            a: a.dims(),
            b: b.dims(),
        });
    }
    Ok(())
}

fn merge_labels(a: &FrameSample, b: &FrameSample, image: image::RgbImage) -> FrameSample {
    let mut objects = a.objects.clone();
    objects.extend(b.objects.iter().cloned());
    let mut sources = a.sources.clone();
    sources.extend(b.sources.iter().cloned());
    FrameSample {
        frame_id: a.frame_id.clone(),
        image,
        objects,
        calib: a.calib,
        sources,
    }
}

fn blend(a: &FrameSample, b: &FrameSample, op: impl Fn(u8, u8) -> u8) -> Result<FrameSample> {
    check_dims(a, b)?;
    let mask = boxes_mask(&b.objects, b.dims());
    let mut image = a.image.clone();
    for (x, y, px) in image.enumerate_pixels_mut() {
        if mask.get(x, y) {
            let q = b.image.get_pixel(x, y);
            *px = Rgb(std::array::from_fn(|c| op(px[c], q[c])));
        }
    }
    Ok(merge_labels(a, b, image))
}

/// Average of the two images under `b`'s box mask, rounded half up.
pub fn box_mixup(a: &FrameSample, b: &FrameSample) -> Result<FrameSample> {
    blend(a, b, |p, q| ((p as u16 + q as u16 + 1) >> 1) as u8)
}

/// `b`'s pixels under its own box mask, pasted onto `a`.
pub fn box_cut_paste(a: &FrameSample, b: &FrameSample) -> Result<FrameSample> {
    blend(a, b, |_, q| q)
}

/// Erases `cfg.cutout_holes` rectangles; labels are unchanged.
pub fn cutout(a: &FrameSample, cfg: &AugmentConfig) -> Result<FrameSample> {
    cfg.validate()?;
    Ok(cutout_step(a, cfg, 0))
}

fn cutout_step(a: &FrameSample, cfg: &AugmentConfig, step: u64) -> FrameSample {
    let (width, height) = a.dims();
    let mut out = a.clone();
    if width == 0 || height == 0 {
        return out;
    }
    let fill = match cfg.fill {
        Fill::Zero => Rgb([0, 0, 0]),
        Fill::ChannelMean => channel_mean(&a.image),
    };
    let side = |extent: u32| ((cfg.cutout_frac * extent as f64).round() as u32).clamp(1, extent);
    let (w, h) = (side(width), side(height));
    for hole in 0..cfg.cutout_holes {
        let mut rng = keyed_rng(cfg.seed, "cutout", &a.frame_id, &[step, hole as u64]);
        let left = rng.gen_range(0..=width - w);
        let top = rng.gen_range(0..=height - h);
        for y in top..top + h {
            for x in left..left + w {
                out.image.put_pixel(x, y, fill);
            }
        }
    }
    out
}

fn channel_mean(image: &image::RgbImage) -> Rgb<u8> {
    let n = image.width() as u64 * image.height() as u64;
    let mut sums = [0u64; 3];
    for px in image.pixels() {
        for c in 0..3 {
            sums[c] += px[c] as u64;
        }
    }
    Rgb(sums.map(|s| ((s + n / 2) / n.max(1)) as u8))
}

/// Source of partner frames for pairing augmentations.
pub trait FramePool {
    /// `(frame_id, (width, height))` for every frame in the pool.
    fn entries(&self) -> Vec<(String, (u32, u32))>;
    fn load(&self, frame_id: &str) -> Result<FrameSample>;
}

impl FramePool for [FrameSample] {
    fn entries(&self) -> Vec<(String, (u32, u32))> {
        self.iter().map(|f| (f.frame_id.clone(), f.dims())).collect()
    }

    fn load(&self, frame_id: &str) -> Result<FrameSample> {
        self.iter()
            .find(|f| f.frame_id == frame_id)
            .cloned()
            .ok_or_else(|| Error::Frame {
                frame: frame_id.to_string(),
                message: "not in pool".into(),
            })
    }
}

impl FramePool for Vec<FrameSample> {
    fn entries(&self) -> Vec<(String, (u32, u32))> {
        self.as_slice().entries()
    }

    fn load(&self, frame_id: &str) -> Result<FrameSample> {
        self.as_slice().load(frame_id)
    }
}

/// Result of [`compose`]: the sample and the partner drawn at each pairing step.
#[derive(Debug, Clone, PartialEq)]
pub struct Composed {
    pub sample: FrameSample,
    pub partners: Vec<String>,
}

fn pick_partner<P: FramePool + ?Sized>(a: &FrameSample, pool: &P, cfg: &AugmentConfig, step: u64) -> Result<String> {
    let mut candidates: Vec<String> = match cfg.partner_policy {
        PartnerPolicy::UniformSameDims => pool
            .entries()
            .into_iter()
            .filter(|(id, dims)| *dims == a.dims() && *id != a.frame_id)
            .map(|(id, _)| id)
            .collect(),
    };
    if candidates.is_empty() {
        return Err(Error::EmptyPool(a.frame_id.clone()));
    }
    candidates.sort();
    let mut rng = keyed_rng(cfg.seed, "partner", &a.frame_id, &[step]);
    Ok(candidates.swap_remove(rng.gen_range(0..candidates.len())))
}

/// Applies `cfg.pipeline` left to right. Partners are drawn from `pool` with
/// an RNG keyed by the input frame id and the step index.
pub fn compose<P: FramePool + ?Sized>(a: &FrameSample, pool: &P, cfg: &AugmentConfig) -> Result<Composed> {
    cfg.validate()?;
    let mut current = a.clone();
    let mut partners = Vec::new();
    for (step, kind) in cfg.pipeline.iter().enumerate() {
        let step = step as u64;
        current = match kind {
            AugmentKind::Cutout => cutout_step(&current, cfg, step),
            AugmentKind::BoxMixup | AugmentKind::BoxCutPaste => {
                let id = pick_partner(a, pool, cfg, step)?;
                let partner = pool.load(&id)?;
                partners.push(id);
                if *kind == AugmentKind::BoxMixup {
                    box_mixup(&current, &partner)?
                } else {
                    box_cut_paste(&current, &partner)?
                }
            }
        };
    }
    Ok(Composed {
        sample: current,
        partners,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitti_io::{BBox2D, Calibration, ClassId, Dims};
    use image::RgbImage;

    fn obj(class: ClassId, l: f64, t: f64, r: f64, b: f64) -> Object3D {
        Object3D::new(
            class,
            BBox2D::new(l, t, r, b),
            Dims::new(1.0, 1.0, 1.0),
            [0.0, 0.0, 10.0],
            0.0,
        )
    }

    fn flat(id: &str, (w, h): (u32, u32), value: u8, objects: Vec<Object3D>) -> FrameSample {
        FrameSample::new(
            id,
            RgbImage::from_pixel(w, h, Rgb([value; 3])),
            objects,
            Calibration::pinhole(700.0, w as f64 / 2.0, h as f64 / 2.0),
        )
    }

    #[test]
    fn mask_examples() {
        assert_eq!(boxes_mask(&[], (20, 20)).count(), 0);
        let one = boxes_mask(&[obj(ClassId::Car, 0.0, 0.0, 10.0, 10.0)], (20, 20));
        assert_eq!(one.count(), 100);
        assert!(one.get(9, 9) && !one.get(10, 9));
        let two = boxes_mask(
            &[
                obj(ClassId::Car, 0.0, 0.0, 10.0, 10.0),
                obj(ClassId::Cyclist, 5.0, 5.0, 15.0, 15.0),
            ],
            (20, 20),
        );
        assert_eq!(two.count(), 175);
        let ignored = boxes_mask(
            &[
                obj(ClassId::DontCare, 0.0, 0.0, 10.0, 10.0),
                obj(ClassId::Other("Van".into()), 0.0, 0.0, 10.0, 10.0),
            ],
            (20, 20),
        );
        assert_eq!(ignored.count(), 0);
    }

    #[test]
    fn mixup_pixels() {
        let a = flat("a", (20, 10), 100, vec![obj(ClassId::Car, 15.0, 0.0, 20.0, 10.0)]);
        let b = flat("b", (20, 10), 50, vec![obj(ClassId::Pedestrian, 0.0, 0.0, 10.0, 10.0)]);
        let out = box_mixup(&a, &b).unwrap();
        assert_eq!(out.image.get_pixel(5, 5), &Rgb([75; 3]));
        assert_eq!(out.image.get_pixel(15, 5), &Rgb([100; 3]));
        assert_eq!(out.objects.len(), 2);
        assert_eq!(out.sources, vec!["a".to_string(), "b".to_string()]);
        assert_eq!(out.calib, a.calib);
        assert_eq!(out.frame_id, "a");
    }

    #[test]
    fn mixup_rounds_half_up() {
        let a = flat("a", (4, 4), 100, vec![]);
        let b = flat("b", (4, 4), 51, vec![obj(ClassId::Car, 0.0, 0.0, 4.0, 4.0)]);
        assert_eq!(box_mixup(&a, &b).unwrap().image.get_pixel(0, 0), &Rgb([76; 3]));
    }

    #[test]
    fn empty_partner_is_neutral() {
        let a = flat("a", (8, 8), 100, vec![obj(ClassId::Car, 0.0, 0.0, 4.0, 4.0)]);
        let b = flat("b", (8, 8), 7, vec![]);
        for out in [box_mixup(&a, &b).unwrap(), box_cut_paste(&a, &b).unwrap()] {
            assert_eq!(out.image, a.image);
            assert_eq!(out.objects, a.objects);
        }
    }

    #[test]
    fn cut_paste_partition() {
        let a = flat("a", (20, 10), 100, vec![]);
        let b = flat("b", (20, 10), 3, vec![obj(ClassId::Car, 0.0, 0.0, 10.0, 10.0)]);
        let out = box_cut_paste(&a, &b).unwrap();
        assert_eq!(out.image.get_pixel(2, 2), &Rgb([3; 3]));
        assert_eq!(out.image.get_pixel(12, 2), &Rgb([100; 3]));

        let a = flat("a", (8, 8), 9, vec![obj(ClassId::Car, 1.0, 1.0, 4.0, 4.0)]);
        let self_paste = box_cut_paste(&a, &a).unwrap();
        assert_eq!(self_paste.image, a.image);
        assert_eq!(self_paste.objects.len(), 2);
    }

    #[test]
    fn dimension_mismatch() {
        let a = flat("a", (8, 8), 0, vec![]);
        let b = flat("b", (8, 9), 0, vec![]);
        assert!(matches!(box_mixup(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(box_cut_paste(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cutout_four_holes() {
        let a = flat("000001", (300, 100), 200, vec![obj(ClassId::Car, 0.0, 0.0, 10.0, 10.0)]);
        let cfg = AugmentConfig {
            pipeline: vec![AugmentKind::Cutout],
            seed: 3,
            ..AugmentConfig::default()
        };
        let out = cutout(&a, &cfg).unwrap();
        assert_eq!(out.objects, a.objects);
        let zeroed = out.image.pixels().filter(|p| **p == Rgb([0; 3])).count();
        assert!(zeroed > 0 && zeroed <= 4 * 30 * 10);
        assert_eq!(cutout(&a, &cfg).unwrap(), out);

        let tiny = AugmentConfig {
            cutout_frac: 1e-6,
            ..cfg.clone()
        };
        let changed = cutout(&a, &tiny)
            .unwrap()
            .image
            .pixels()
            .zip(a.image.pixels())
            .filter(|(p, q)| p != q)
            .count();
        assert!((1..=4).contains(&changed));
    }

    #[test]
    fn cutout_mean_fill() {
        let mut img = RgbImage::from_pixel(10, 10, Rgb([10, 20, 30]));
        img.put_pixel(0, 0, Rgb([110, 20, 30]));
        let a = FrameSample::new("m", img, vec![], Calibration::pinhole(1.0, 0.0, 0.0));
        let cfg = AugmentConfig {
            fill: Fill::ChannelMean,
            cutout_holes: 1,
            cutout_frac: 0.5,
            ..AugmentConfig::default()
        };
        let out = cutout(&a, &cfg).unwrap();
        assert!(out.image.pixels().any(|p| *p == Rgb([11, 20, 30])));
    }

    #[test]
    fn config_validation() {
        let mut cfg = AugmentConfig {
            pipeline: vec![AugmentKind::Cutout],
            cutout_holes: 0,
            ..AugmentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.cutout_holes = 4;
        cfg.cutout_frac = 1.0;
        assert!(cfg.validate().is_err());
        cfg.cutout_frac = 0.1;
        cfg.pipeline.clear();
        assert!(matches!(cfg.validate(), Err(Error::EmptyPipeline)));
        let a = flat("a", (8, 8), 0, vec![]);
        assert!(matches!(compose(&a, &Vec::new(), &cfg), Err(Error::EmptyPipeline)));
    }

    #[test]
    fn compose_chains_mixup_then_cutout() {
        let a = flat("a", (30, 30), 100, vec![obj(ClassId::Car, 0.0, 0.0, 5.0, 5.0)]);
        let pool = vec![
            a.clone(),
            flat("b", (30, 30), 50, vec![obj(ClassId::Car, 0.0, 0.0, 30.0, 30.0)]),
            flat("c", (31, 30), 0, vec![]),
        ];
        let cfg = AugmentConfig {
            pipeline: vec![AugmentKind::BoxMixup, AugmentKind::Cutout],
            seed: 9,
            ..AugmentConfig::default()
        };
        let out = compose(&a, &pool, &cfg).unwrap();
        assert_eq!(out.partners, vec!["b".to_string()]);
        let mixed = box_mixup(&a, &pool[1]).unwrap();
        assert_eq!(out.sample, cutout_step(&mixed, &cfg, 1));
        assert_eq!(out.sample.objects.len(), 2);
        assert_eq!(compose(&a, &pool, &cfg).unwrap(), out);
    }

    #[test]
    fn compose_without_partner_fails() {
        let a = flat("a", (30, 30), 100, vec![]);
        let pool = vec![a.clone(), flat("c", (31, 30), 0, vec![])];
        let cfg = AugmentConfig::default();
        assert!(matches!(compose(&a, &pool, &cfg), Err(Error::EmptyPool(_))));
        let cut = AugmentConfig {
            pipeline: vec![AugmentKind::Cutout],
            ..AugmentConfig::default()
        };
        assert!(compose(&a, &Vec::new(), &cut).is_ok());
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("boxmixup".parse::<AugmentKind>().unwrap(), AugmentKind::BoxMixup);
        assert_eq!("cut-paste".parse::<AugmentKind>().unwrap(), AugmentKind::BoxCutPaste);
        assert_eq!("Cutout".parse::<AugmentKind>().unwrap(), AugmentKind::Cutout);
        assert!("flip".parse::<AugmentKind>().is_err());
    }
}
