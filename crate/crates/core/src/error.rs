use std::path::PathBuf;

use crate::kitti_io::ClassId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: expected 15 or 16 fields, found {count}")]
    FieldCount { line: usize, count: usize },

    #[error("line {line}: cannot parse field `{field}` from {value:?}")]
    ParseField {
        line: usize,
        field: &'static str,
        value: String,
    },

    #[error("line {line}: invalid record: {message}")]
    InvalidRecord { line: usize, message: String },

    #[error("calibration has no P2 line")]
    MissingP2,

    #[error("calibration P2 line: {0}")]
    InvalidCalib(String),

    #[error("split line {line}: duplicate frame id {id:?}")]
    DuplicateFrame { line: usize, id: String },

    #[error("frame {frame}: {message}")]
    Frame { frame: String, message: String },

    #[error("point {index} lies behind the camera (z = {z})")]
    BehindCamera { index: usize, z: f64 },

    #[error("detection {index} has no score")]
    MissingScore { index: usize },

    #[error("class list is empty")]
    EmptyClasses,

    #[error("ground truth contains no objects of the evaluation classes")]
    EmptyGroundTruth,

    #[error("class {0} has zero frequency")]
    ZeroFrequency(ClassId),

    #[error("AP and weight maps cover different classes")]
    ClassMismatch,

    #[error("frame ids differ between ground truth and detections; missing detections: {missing_det:?}, missing ground truth: {missing_gt:?}")]
    FrameMismatch {
        missing_det: Vec<String>,
        missing_gt: Vec<String>,
    },

    #[error("image dimensions differ: {a:?} vs {b:?}")]
    DimensionMismatch { a: (u32, u32), b: (u32, u32) },

    #[error("augmentation pipeline is empty")]
    EmptyPipeline,

    #[error("no partner frame with matching dimensions for {0}")]
    EmptyPool(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::InFile {
            path: path.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
