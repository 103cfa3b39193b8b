//! Tooling for self-supervised monocular 3D detection experiments on KITTI.
//!
//! The crate covers the non-network half of the pipeline:
//!
//! * [`kitti_io`] parses and writes KITTI labels, calibration, split files and
//!   PNG frames.
//! * [`geometry`] builds 3D box corners, projects the nine cuboid keypoints and
//!   computes exact 2D, bird's-eye-view and 3D IoU through convex clipping.
//! * [`metrics`] matches detections, computes interpolated AP, mAP, inverse
//!   class-frequency weights and the weighted (ICFW) mAP.
//! * [`ssl_mol`] samples random windows and produces multi-object soft labels.
//! * [`augment`] implements Box-Mixup, Box-Cut-Paste, Cutout and chaining.
//!
//! All randomness goes through [`rng::keyed_rng`], so outputs depend only on
//! the seed and the identity of the item being generated, never on scheduling.

pub mod augment;
pub mod error;
pub mod geometry;
pub mod kitti_io;
pub mod metrics;
pub mod rng;
pub mod ssl_mol;

pub use error::{Error, Result};
pub use kitti_io::{BBox2D, Calibration, ClassId, Dims, FrameSample, Object3D};
