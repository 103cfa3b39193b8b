use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{exact, APResult};
use crate::error::{Error, Result};
use crate::kitti_io::{ClassId, Object3D};

/// Unweighted mean of the per-class APs.
pub fn map(aps: &[APResult]) -> Result<f64> {
    if aps.is_empty() {
        return Err(Error::EmptyClasses);
    }
    let values: Vec<f64> = aps.iter().map(|r| r.ap).collect();
    Ok(exact::mean(&values))
}

/// Share of each class among the ground-truth objects of `classes`.
///
/// DontCare and any class outside `classes` are left out of both the counts
/// and the total.
pub fn class_frequencies<'a, I>(frames: I, classes: &[ClassId]) -> Result<BTreeMap<ClassId, f64>>
where
    I: IntoIterator<Item = &'a [Object3D]>,
{
    let mut counts: BTreeMap<ClassId, u64> = classes.iter().map(|c| (c.clone(), 0)).collect();
    for frame in frames {
        for obj in frame {
            if let Some(n) = counts.get_mut(&obj.class) {
                *n += 1;
            }
        }
    }
    counts.remove(&ClassId::DontCare);
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    Ok(counts.into_iter().map(|(c, n)| (c, n as f64 / total as f64)).collect())
}

/// Class frequencies and their normalized inverses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights {
    freq: BTreeMap<ClassId, f64>,
    weight: BTreeMap<ClassId, f64>,
}

impl ClassWeights {
    pub fn freq(&self) -> &BTreeMap<ClassId, f64> {
        &self.freq
    }

    pub fn weight(&self) -> &BTreeMap<ClassId, f64> {
        &self.weight
    }

    /// Weights as exact rationals; they sum to exactly one.
    fn exact_weights(&self) -> Vec<BigRational> {
        let inverses: Vec<BigRational> = self
            .freq
            .values()
            .map(|f| BigRational::one() / exact::rational(*f))
            .collect();
        let total = inverses.iter().fold(BigRational::zero(), |acc, v| acc + v);
        inverses.into_iter().map(|v| v / &total).collect()
    }
}

/// `w_c = (1 / f_c) / sum_k (1 / f_k)`.
pub fn icfw_weights(freq: &BTreeMap<ClassId, f64>) -> Result<ClassWeights> {
    if freq.is_empty() {
        return Err(Error::EmptyClasses);
    }
    if let Some((class, _)) = freq.iter().find(|(_, f)| !(f.is_finite() && **f > 0.0)) {
        return Err(Error::ZeroFrequency(class.clone()));
    }
    let mut weights = ClassWeights {
        freq: freq.clone(),
        weight: BTreeMap::new(),
    };
    weights.weight = freq
        .keys()
        .cloned()
        .zip(weights.exact_weights().iter().map(exact::round))
        .collect();
    Ok(weights)
}

/// `sum_c w_c * AP_c`, evaluated exactly and rounded once.
pub fn icfw_map(aps: &BTreeMap<ClassId, f64>, weights: &ClassWeights) -> Result<f64> {
    if !aps.keys().eq(weights.freq.keys()) {
        return Err(Error::ClassMismatch);
    }
    let values: Vec<f64> = aps.values().copied().collect();
    Ok(exact::dot(&weights.exact_weights(), &values))
}
