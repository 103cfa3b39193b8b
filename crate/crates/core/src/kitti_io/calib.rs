use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Left color camera projection matrix `P2`, row-major 3x4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub p2: [[f64; 4]; 3],
}

impl Calibration {
    /// Builds a calibration, rejecting non-finite entries and zero focal terms.
    pub fn new(p2: [[f64; 4]; 3]) -> Result<Self> {
        if p2.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCalib("non-finite entry".into()));
        }
        if p2[0][0] == 0.0 || p2[1][1] == 0.0 {
            return Err(Error::InvalidCalib("zero focal length".into()));
        }
        Ok(Self { p2 })
    }

    /// Pinhole camera without skew or baseline offset.
    pub fn pinhole(focal: f64, cx: f64, cy: f64) -> Self {
        Self {
            p2: [[focal, 0.0, cx, 0.0], [0.0, focal, cy, 0.0], [0.0, 0.0, 1.0, 0.0]],
        }
    }
}

/// Reads the `P2:` line of a KITTI calibration file. Other lines are ignored.
pub fn parse_calib(text: &str) -> Result<Calibration> {
    let rest = text
        .lines()
        .find_map(|line| line.trim_start().strip_prefix("P2:"))
        .ok_or(Error::MissingP2)?;
    let values = rest
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::InvalidCalib(format!("cannot parse {tok:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != 12 {
        return Err(Error::InvalidCalib(format!(
            "expected 12 numbers, found {}",
            values.len()
        )));
    }
    let mut p2 = [[0.0; 4]; 3];
    for (i, v) in values.into_iter().enumerate() {
        p2[i / 4][i % 4] = v;
    }
    Calibration::new(p2)
}

/// A calibration file containing only the `P2:` line.
pub fn serialize_calib(calib: &Calibration) -> String {
    let values: Vec<String> = calib.p2.iter().flatten().map(|v| format!("{v:e}")).collect();
    format!("P2: {}\n", values.join(" "))
}
