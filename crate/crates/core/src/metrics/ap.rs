use serde::{Deserialize, Serialize};

use super::{Interpolation, Match};
use crate::kitti_io::ClassId;

/// Average precision of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct APResult {
    pub class: ClassId,
    /// In `[0, 1]`; multiply by 100 for the usual percentage.
    pub ap: f64,
    /// `(recall, precision)` after each ranked detection.
    pub pr_points: Vec<(f64, f64)>,
    pub n_gt: usize,
    pub n_det: usize,
    /// Set when there was no ground truth and AP was defined as 0.
    pub no_ground_truth: bool,
}

/// Interpolated AP: for each recall sample `r`, the best precision reached at
/// recall `>= r`, averaged over the samples.
///
/// `matches` may come from several frames; they are ranked by descending
/// score with ties kept in the given order.
pub fn average_precision(class: ClassId, matches: &[Match], n_gt: usize, interpolation: Interpolation) -> APResult {
    let mut ranked: Vec<&Match> = matches.iter().collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));

    if n_gt == 0 {
        log::warn!("class {class}: no ground truth, AP defined as 0");
        return APResult {
            class,
            ap: 0.0,
            pr_points: Vec::new(),
            n_gt,
            n_det: ranked.len(),
            no_ground_truth: true,
        };
    }

    let mut tp_counts = Vec::with_capacity(ranked.len());
    let mut pr_points = Vec::with_capacity(ranked.len());
    let mut tp = 0u64;
    for (k, m) in ranked.iter().enumerate() {
        tp += m.tp as u64;
        tp_counts.push(tp);
        pr_points.push((tp as f64 / n_gt as f64, tp as f64 / (k + 1) as f64));
    }

    // suffix maximum of precision
    let mut best_after = vec![0.0; pr_points.len()];
    let mut running = 0.0f64;
    for k in (0..pr_points.len()).rev() {
        running = running.max(pr_points[k].1);
        best_after[k] = running;
    }

    let n = n_gt as u64;
    let mut total = 0.0;
    let mut samples = 0usize;
    for (num, den) in interpolation.thresholds() {
        samples += 1;
        // first rank whose recall tp/n reaches num/den, compared exactly
        let k = tp_counts.partition_point(|&t| t * den < num * n);
        if k < best_after.len() {
            total += best_after[k];
        }
    }

    APResult {
        class,
        ap: total / samples as f64,
        pr_points,
        n_gt,
        n_det: ranked.len(),
        no_ground_truth: false,
    }
}
