use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matching::{count_gt, match_detections_with};
use super::{
    average_precision, class_frequencies, icfw_map, icfw_weights, map, APResult, ClassWeights, EvalConfig, IouKind,
    Match,
};
use crate::error::{Error, Result};
use crate::kitti_io::{read_label_dir, ClassId, Object3D};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Scores for one IoU kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindResult {
    pub kind: IouKind,
    /// AP in `[0, 1]` keyed by class.
    pub per_class_ap: BTreeMap<ClassId, f64>,
    pub map: f64,
    /// `None` when some evaluation class has no ground truth.
    pub icfw_map: Option<f64>,
    #[serde(skip)]
    pub details: Vec<APResult>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub gt: BTreeMap<ClassId, usize>,
    pub det: BTreeMap<ClassId, usize>,
}

/// Everything a Table-1 style row needs, for every requested IoU kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub config: EvalConfig,
    pub frames: usize,
    pub freq: BTreeMap<ClassId, f64>,
    pub weights: Option<BTreeMap<ClassId, f64>>,
    pub counts: Counts,
    pub results: Vec<KindResult>,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn result(&self, kind: IouKind) -> Option<&KindResult> {
        self.results.iter().find(|r| r.kind == kind)
    }

    /// Plain-text table: one mAP and one ICFW mAP column per IoU kind,
    /// percentages with two decimals, followed by per-class AP rows.
    pub fn to_table(&self) -> String {
        let pct = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{:.2}", v * 100.0));
        let mut header = vec![format!("IoU={}", self.config.iou_threshold)];
        let mut row = vec!["result".to_string()];
        for r in &self.results {
            header.push(format!("mAP_{}", r.kind.label()));
            row.push(pct(Some(r.map)));
        }
        for r in &self.results {
            header.push(format!("ICFW mAP_{}", r.kind.label()));
            row.push(pct(r.icfw_map));
        }
        let mut out = String::new();
        write_row(&mut out, &header);
        write_row(&mut out, &row);
        out.push('\n');

        let mut header = vec!["class".to_string(), "f_c".to_string(), "w_c".to_string()];
        header.extend(self.results.iter().map(|r| format!("AP_{}", r.kind.label())));
        write_row(&mut out, &header);
        for class in &self.config.classes {
            let mut row = vec![
                class.to_string(),
                self.freq.get(class).map_or("n/a".into(), |f| format!("{f:.4}")),
                self.weights
                    .as_ref()
                    .and_then(|w| w.get(class))
                    .map_or("n/a".into(), |w| format!("{w:.4}")),
            ];
            row.extend(self.results.iter().map(|r| pct(r.per_class_ap.get(class).copied())));
            write_row(&mut out, &row);
        }
        out
    }
}

fn write_row(out: &mut String, cells: &[String]) {
    let line: Vec<String> = cells.iter().map(|c| format!("{c:>14}")).collect();
    let _ = writeln!(out, "|{}|", line.join("|"));
}

/// Evaluates two label directories (`<frame>.txt` files).
pub fn evaluate(gt_dir: &Path, det_dir: &Path, cfg: &EvalConfig) -> Result<EvalReport> {
    let gt = read_label_dir(gt_dir)?;
    let det = read_label_dir(det_dir)?;
    evaluate_frames(&gt, &det, cfg)
}

/// Evaluates in-memory frames. Both maps must have the same keys.
///
/// Frames are matched independently (in parallel) and merged in frame-id
/// order, so the result does not depend on the thread count.
pub fn evaluate_frames(
    gt: &BTreeMap<String, Vec<Object3D>>,
    det: &BTreeMap<String, Vec<Object3D>>,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    cfg.validate()?;
    let missing_det: Vec<String> = gt.keys().filter(|k| !det.contains_key(*k)).cloned().collect();
    let missing_gt: Vec<String> = det.keys().filter(|k| !gt.contains_key(*k)).cloned().collect();
    if !missing_det.is_empty() || !missing_gt.is_empty() {
        return Err(Error::FrameMismatch {
            missing_det,
            missing_gt,
        });
    }

    let frames: Vec<(&String, &Vec<Object3D>, &Vec<Object3D>)> = gt.iter().map(|(id, g)| (id, g, &det[id])).collect();
    let mut warnings = Vec::new();

    let mut counts = Counts::default();
    for class in &cfg.classes {
        let n_gt: usize = frames.iter().map(|(_, g, _)| count_gt(g, cfg, class)).sum();
        let n_det: usize = frames
            .iter()
            .map(|(_, _, d)| d.iter().filter(|o| o.class == *class).count())
            .sum();
        counts.gt.insert(class.clone(), n_gt);
        counts.det.insert(class.clone(), n_det);
    }

    let (freq, weights) = match class_frequencies(gt.values().map(Vec::as_slice), &cfg.classes)
        .and_then(|f| icfw_weights(&f).map(|w| (f, w)))
    {
        Ok((f, w)) => (f, Some(w)),
        Err(e @ (Error::EmptyGroundTruth | Error::ZeroFrequency(_))) => {
            warnings.push(format!("ICFW weights undefined: {e}"));
            let f = class_frequencies(gt.values().map(Vec::as_slice), &cfg.classes)
                .unwrap_or_else(|_| cfg.classes.iter().map(|c| (c.clone(), 0.0)).collect());
            (f, None)
        }
        Err(e) => return Err(e),
    };

    let mut results = Vec::with_capacity(cfg.iou_kinds.len());
    for &kind in &cfg.iou_kinds {
        let mut details = Vec::with_capacity(cfg.classes.len());
        for class in &cfg.classes {
            let per_frame: Vec<Vec<Match>> = frames
                .par_iter()
                .map(|(_, g, d)| match_detections_with(g, d, cfg, class, kind))
                .collect::<Result<_>>()?;
            // frame-id order, then in-frame rank: the canonical tie order
            let merged: Vec<Match> = per_frame.into_iter().flatten().collect();
            let result = average_precision(class.clone(), &merged, counts.gt[class], cfg.interpolation);
            if result.no_ground_truth {
                warnings.push(format!("{} {class}: no ground truth, AP set to 0", kind.label()));
            }
            details.push(result);
        }
        let per_class_ap: BTreeMap<ClassId, f64> = details.iter().map(|r| (r.class.clone(), r.ap)).collect();
        let icfw = weights.as_ref().map(|w| icfw_map(&per_class_ap, w)).transpose()?;
        results.push(KindResult {
            kind,
            map: map(&details)?,
            icfw_map: icfw,
            per_class_ap,
            details,
        });
    }

    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg.clone(),
        frames: frames.len(),
        freq,
        weights: weights.as_ref().map(|w: &ClassWeights| w.weight().clone()),
        counts,
        results,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitti_io::{BBox2D, Dims};

    fn obj(class: ClassId, x: f64) -> Object3D {
        Object3D::new(
            class,
            BBox2D::new(100.0 + 60.0 * x, 100.0, 150.0 + 60.0 * x, 180.0),
            Dims::new(1.5, 1.6, 3.9),
            [3.0 * x, 1.6, 20.0],
            0.1,
        )
    }

    fn dataset() -> BTreeMap<String, Vec<Object3D>> {
        let mut gt = BTreeMap::new();
        gt.insert(
            "000000".to_string(),
            vec![obj(ClassId::Car, 0.0), obj(ClassId::Pedestrian, 1.0)],
        );
        gt.insert(
            "000001".to_string(),
            vec![obj(ClassId::Cyclist, 0.0), obj(ClassId::Car, 2.0)],
        );
        gt
    }

    #[test]
    fn perfect_detector_scores_one() {
        let gt = dataset();
        let det: BTreeMap<String, Vec<Object3D>> = gt
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().map(|o| o.clone().with_score(1.0)).collect()))
            .collect();
        let report = evaluate_frames(&gt, &det, &EvalConfig::default()).unwrap();
        assert_eq!(report.results.len(), 3);
        for r in &report.results {
            assert!(r.per_class_ap.values().all(|ap| *ap == 1.0), "{r:?}");
            assert_eq!(r.map, 1.0);
            assert_eq!(r.icfw_map, Some(1.0));
        }
        assert!(report.to_table().contains("100.00"));
    }

    #[test]
    fn no_detections_scores_zero() {
        let gt = dataset();
        let det: BTreeMap<String, Vec<Object3D>> = gt.keys().map(|k| (k.clone(), Vec::new())).collect();
        let report = evaluate_frames(&gt, &det, &EvalConfig::default()).unwrap();
        for r in &report.results {
            assert_eq!(r.map, 0.0);
            assert_eq!(r.icfw_map, Some(0.0));
        }
    }

    #[test]
    fn frame_mismatch_lists_ids() {
        let gt = dataset();
        let mut det = BTreeMap::new();
        det.insert("000000".to_string(), Vec::new());
        det.insert("000009".to_string(), Vec::new());
        match evaluate_frames(&gt, &det, &EvalConfig::default()) {
            Err(Error::FrameMismatch {
                missing_det,
                missing_gt,
            }) => {
                assert_eq!(missing_det, vec!["000001"]);
                assert_eq!(missing_gt, vec!["000009"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_class_disables_icfw() {
        let mut gt = BTreeMap::new();
        gt.insert("a".to_string(), vec![obj(ClassId::Car, 0.0)]);
        let det = gt.clone();
        let det = det
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().map(|o| o.with_score(0.5)).collect()))
            .collect();
        let report = evaluate_frames(&gt, &det, &EvalConfig::default()).unwrap();
        assert!(report.weights.is_none());
        assert!(report.results.iter().all(|r| r.icfw_map.is_none()));
        assert!(!report.warnings.is_empty());
        let r = report.result(IouKind::ThreeD).unwrap();
        assert!((r.map - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn json_field_names() {
        let gt = dataset();
        let report = evaluate_frames(
            &gt,
            &gt.keys().map(|k| (k.clone(), vec![])).collect(),
            &EvalConfig::default(),
        )
        .unwrap();
        let v = serde_json::to_value(&report).unwrap();
        for key in ["freq", "weights", "counts", "results", "schema_version"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let first = &v["results"][0];
        for key in ["per_class_ap", "map", "icfw_map", "kind"] {
            assert!(first.get(key).is_some(), "{key}");
        }
        assert_eq!(first["kind"], "2d");
        assert!(v["freq"].get("Car").is_some());
    }
}
