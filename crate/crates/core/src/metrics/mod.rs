//! KITTI-style detection evaluation: matching, interpolated AP, mAP, inverse
//! class-frequency weights and the class-frequency weighted (ICFW) mAP.

mod ap;
mod exact;
mod matching;
mod report;
mod weights;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kitti_io::ClassId;

pub use ap::{average_precision, APResult};
pub use matching::{match_detections, Match};
pub use report::{evaluate, evaluate_frames, Counts, EvalReport, KindResult};
pub use weights::{class_frequencies, icfw_map, icfw_weights, map, ClassWeights};

/// Which overlap measure decides a true positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IouKind {
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "bev")]
    Bev,
    #[serde(rename = "3d")]
    ThreeD,
}

impl IouKind {
    pub const ALL: [IouKind; 3] = [IouKind::TwoD, IouKind::Bev, IouKind::ThreeD];

    pub fn label(&self) -> &'static str {
        match self {
            IouKind::TwoD => "2D",
            IouKind::Bev => "BEV",
            IouKind::ThreeD => "3D",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    /// Recall samples {0, 0.1, ..., 1}.
    R11,
    /// Recall samples {1/40, 2/40, ..., 1}.
    R40,
}

impl Interpolation {
    /// Recall thresholds as `(numerator, denominator)` pairs.
    pub(crate) fn thresholds(&self) -> impl Iterator<Item = (u64, u64)> {
        let (range, denom) = match self {
            Interpolation::R11 => (0..=10u64, 10),
            Interpolation::R40 => (1..=40u64, 40),
        };
        range.map(move |i| (i, denom))
    }
}

/// KITTI difficulty regimes. Each is cumulative: Moderate includes Easy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Moderate,
    Hard,
    All,
}

impl Difficulty {
    /// `(min 2D height px, max occlusion, max truncation)`.
    fn limits(&self) -> Option<(f64, i32, f64)> {
        match self {
            Difficulty::Easy => Some((40.0, 0, 0.15)),
            Difficulty::Moderate => Some((25.0, 1, 0.30)),
            Difficulty::Hard => Some((25.0, 2, 0.50)),
            Difficulty::All => None,
        }
    }

    pub(crate) fn admits_gt(&self, obj: &crate::kitti_io::Object3D) -> bool {
        match self.limits() {
            None => true,
            Some((min_h, max_occ, max_trunc)) => {
                obj.bbox.height() >= min_h && obj.occluded <= max_occ && obj.truncated <= max_trunc
            }
        }
    }

    pub(crate) fn admits_det(&self, obj: &crate::kitti_io::Object3D) -> bool {
        self.limits().is_none_or(|(min_h, _, _)| obj.bbox.height() >= min_h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub iou_kinds: Vec<IouKind>,
    pub iou_threshold: f64,
    pub interpolation: Interpolation,
    pub classes: Vec<ClassId>,
    pub difficulty: Difficulty,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_kinds: IouKind::ALL.to_vec(),
            iou_threshold: 0.5,
            interpolation: Interpolation::R40,
            classes: ClassId::EVAL.to_vec(),
            difficulty: Difficulty::All,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "iou threshold {} outside (0, 1]",
                self.iou_threshold
            )));
        }
        if self.classes.is_empty() {
            return Err(Error::EmptyClasses);
        }
        if self.iou_kinds.is_empty() {
            return Err(Error::Config("no IoU kind requested".into()));
        }
        if self.classes.contains(&ClassId::DontCare) {
            return Err(Error::Config("DontCare cannot be an evaluation class".into()));
        }
        Ok(())
    }
}
