use serde::{Deserialize, Serialize};

use super::{EvalConfig, IouKind};
use crate::error::{Error, Result};
use crate::geometry::{iou_2d, iou_3d, iou_bev};
use crate::kitti_io::{ClassId, Object3D};

/// Outcome for one detection that took part in matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Match {
    /// Index into the detection list handed to [`match_detections`].
    pub det_index: usize,
    pub score: f64,
    pub tp: bool,
}

pub(crate) fn overlap(kind: IouKind, a: &Object3D, b: &Object3D) -> f64 {
    match kind {
        IouKind::TwoD => iou_2d(&a.bbox, &b.bbox),
        IouKind::Bev => iou_bev(a, b),
        IouKind::ThreeD => iou_3d(a, b),
    }
}

/// Greedy matching of one frame's detections of `class` against its ground
/// truth, using the first entry of `cfg.iou_kinds`.
pub fn match_detections(gt: &[Object3D], det: &[Object3D], cfg: &EvalConfig, class: &ClassId) -> Result<Vec<Match>> {
    let kind = cfg.iou_kinds.first().copied().unwrap_or(IouKind::ThreeD);
    match_detections_with(gt, det, cfg, class, kind)
}

/// Detections are visited by descending score (ties keep input order). Each
/// one claims the unmatched ground truth of its class with the highest IoU
/// if that IoU exceeds the threshold. Claiming a box excluded by the
/// difficulty filter, or overlapping a DontCare region in 2D, drops the
/// detection from the result.
pub(crate) fn match_detections_with(
    gt: &[Object3D],
    det: &[Object3D],
    cfg: &EvalConfig,
    class: &ClassId,
    kind: IouKind,
) -> Result<Vec<Match>> {
    if let Some(index) = det.iter().position(|d| d.score.is_none()) {
        return Err(Error::MissingScore { index });
    }

    // (object, counts towards n_gt)
    let targets: Vec<(&Object3D, bool)> = gt
        .iter()
        .filter(|g| g.class == *class)
        .map(|g| (g, cfg.difficulty.admits_gt(g)))
        .collect();
    let dont_care: Vec<&Object3D> = gt.iter().filter(|g| g.class == ClassId::DontCare).collect();

    let mut order: Vec<usize> = (0..det.len())
        .filter(|&i| det[i].class == *class && cfg.difficulty.admits_det(&det[i]))
        .collect();
    order.sort_by(|&a, &b| score_of(&det[b]).total_cmp(&score_of(&det[a])));

    let mut taken = vec![false; targets.len()];
    let mut out = Vec::with_capacity(order.len());
    for i in order {
        let d = &det[i];
        let best = targets
            .iter()
            .enumerate()
            .filter(|(j, _)| !taken[*j])
            .map(|(j, (g, _))| (j, overlap(kind, g, d)))
            .fold(None::<(usize, f64)>, |best, (j, iou)| match best {
                Some((_, b)) if b >= iou => best,
                _ => Some((j, iou)),
            });
        match best {
            Some((j, iou)) if iou > cfg.iou_threshold => {
                taken[j] = true;
                if targets[j].1 {
                    out.push(Match {
                        det_index: i,
                        score: score_of(d),
                        tp: true,
                    });
                }
            }
            _ => {
                let ignored = dont_care.iter().any(|dc| iou_2d(&dc.bbox, &d.bbox) > cfg.iou_threshold);
                if !ignored {
                    out.push(Match {
                        det_index: i,
                        score: score_of(d),
                        tp: false,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn score_of(o: &Object3D) -> f64 {
    o.score.unwrap_or(f64::NEG_INFINITY)
}

/// Ground-truth boxes of `class` that count towards recall.
pub(crate) fn count_gt(gt: &[Object3D], cfg: &EvalConfig, class: &ClassId) -> usize {
    gt.iter()
        .filter(|g| g.class == *class && cfg.difficulty.admits_gt(g))
        .count()
}
