//! KITTI object-detection data: label records, P2 calibration, split files and
//! frames on disk.
//!
//! Loaders are pure functions of the bytes they are given. The directory
//! helpers in [`dataset`] only read, except for the explicit `write_*` calls.

mod calib;
mod dataset;
mod label;
mod split;

use std::fmt;
use std::str::FromStr;

use image::RgbImage;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use calib::{parse_calib, serialize_calib, Calibration};
pub use dataset::{read_label_dir, KittiDataset};
pub use label::{parse_label_file, parse_label_line, serialize_label_file, serialize_object};
pub use split::load_split;

/// Object class as written in the first label column.
///
/// Only `Car`, `Pedestrian` and `Cyclist` are evaluation classes. Every other
/// string is kept verbatim in `Other` so files survive a round trip.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassId {
    Car,
    Pedestrian,
    Cyclist,
    DontCare,
    Other(String),
}

impl ClassId {
    /// The evaluation classes in canonical order.
    pub const EVAL: [ClassId; 3] = [ClassId::Car, ClassId::Pedestrian, ClassId::Cyclist];

    pub fn as_str(&self) -> &str {
        match self {
            ClassId::Car => "Car",
            ClassId::Pedestrian => "Pedestrian",
            ClassId::Cyclist => "Cyclist",
            ClassId::DontCare => "DontCare",
            ClassId::Other(name) => name,
        }
    }

    pub fn is_eval_class(&self) -> bool {
        matches!(self, ClassId::Car | ClassId::Pedestrian | ClassId::Cyclist)
    }
}

impl From<&str> for ClassId {
    fn from(name: &str) -> Self {
        match name {
            "Car" => ClassId::Car,
            "Pedestrian" => ClassId::Pedestrian,
            "Cyclist" => ClassId::Cyclist,
            "DontCare" => ClassId::DontCare,
            other => ClassId::Other(other.to_string()),
        }
    }
}

impl FromStr for ClassId {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(ClassId::from(s))
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ClassId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ClassId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        Ok(ClassId::from(name.as_str()))
    }
}

/// Axis-aligned image rectangle in pixels, `(left, top, right, bottom)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BBox2D {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
}

impl BBox2D {
    pub fn new(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Self {
            left,
            top,
            right,
            bottom,
        }
    }

    pub fn width(&self) -> f64 {
        (self.right - self.left).max(0.0)
    }

    pub fn height(&self) -> f64 {
        (self.bottom - self.top).max(0.0)
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Overlap rectangle, or `None` when the interiors do not meet.
    pub fn intersection(&self, other: &BBox2D) -> Option<BBox2D> {
        let left = self.left.max(other.left);
        let top = self.top.max(other.top);
        let right = self.right.min(other.right);
        let bottom = self.bottom.min(other.bottom);
        (right > left && bottom > top).then(|| BBox2D::new(left, top, right, bottom))
    }

    pub fn clamped(&self, width: f64, height: f64) -> BBox2D {
        BBox2D::new(
            self.left.clamp(0.0, width),
            self.top.clamp(0.0, height),
            self.right.clamp(0.0, width),
            self.bottom.clamp(0.0, height),
        )
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.left, self.top, self.right, self.bottom]
    }
}

/// Box size in meters, KITTI order: height, width, length.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Dims {
    pub h: f64,
    pub w: f64,
    pub l: f64,
}

impl Dims {
    pub fn new(h: f64, w: f64, l: f64) -> Self {
        Self { h, w, l }
    }

    /// The `-1 -1 -1` placeholder KITTI writes for DontCare regions.
    pub fn is_sentinel(&self) -> bool {
        self.h == -1.0 && self.w == -1.0 && self.l == -1.0
    }
}

/// One KITTI label record: a ground-truth object (15 fields) or a detection
/// (16 fields, the last being the confidence score).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Object3D {
    pub class: ClassId,
    pub truncated: f64,
    /// 0 visible .. 3 unknown; detection files use -1.
    pub occluded: i32,
    pub alpha: f64,
    pub bbox: BBox2D,
    pub dims: Dims,
    /// Bottom-face center in camera coordinates (x right, y down, z forward).
    pub location: [f64; 3],
    pub rotation_y: f64,
    pub score: Option<f64>,
}

impl Object3D {
    /// Minimal ground-truth record; the remaining fields take KITTI's
    /// "unknown" values.
    pub fn new(class: ClassId, bbox: BBox2D, dims: Dims, location: [f64; 3], rotation_y: f64) -> Self {
        Self {
            class,
            truncated: 0.0,
            occluded: 0,
            alpha: 0.0,
            bbox,
            dims,
            location,
            rotation_y,
            score: None,
        }
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    pub fn is_detection(&self) -> bool {
        self.score.is_some()
    }
}

/// An image with its labels and calibration.
///
/// `sources[i]` names the frame that `objects[i]` was annotated in. It equals
/// `frame_id` on load and diverges once augmentations merge label sets.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSample {
    pub frame_id: String,
    pub image: RgbImage,
    pub objects: Vec<Object3D>,
    pub calib: Calibration,
    pub sources: Vec<String>,
}

impl FrameSample {
    /// Builds a sample, clamping every 2D box into the image.
    pub fn new(frame_id: impl Into<String>, image: RgbImage, objects: Vec<Object3D>, calib: Calibration) -> Self {
        let frame_id = frame_id.into();
        let (w, h) = (image.width() as f64, image.height() as f64);
        let objects: Vec<Object3D> = objects
            .into_iter()
            .map(|mut o| {
                o.bbox = o.bbox.clamped(w, h);
                o
            })
            .collect();
        let sources = vec![frame_id.clone(); objects.len()];
        Self {
            frame_id,
            image,
            objects,
            calib,
            sources,
        }
    }

    pub fn dims(&self) -> (u32, u32) {
        self.image.dimensions()
    }
}
