//! Grading a predicted ROI against a ground-truth mask.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::BinaryMask;

pub const DEFAULT_SLACK: f64 = 0.10;

/// Jaccard index a detection must reach to count as correct.
pub const MIN_JACCARD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionClass {
    Correct,
    More,
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionMetrics {
    /// `|pred ∩ truth| / |pred ∪ truth|`
    pub jaccard: f64,
    /// `|pred| / |truth|`
    pub area_ratio: f64,
}

pub fn detection_metrics(pred: &BinaryMask, truth: &BinaryMask) -> Result<DetectionMetrics> {
    if pred.dimensions() != truth.dimensions() {
        return Err(Error::DimensionMismatch {
            left: pred.dimensions(),
            right: truth.dimensions(),
        });
    }
    let truth_n = truth.count();
    if truth_n == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let union = pred.union_count(truth);
    Ok(DetectionMetrics {
        jaccard: pred.intersection_count(truth) as f64 / union as f64,
        area_ratio: pred.count() as f64 / truth_n as f64,
    })
}

impl DetectionMetrics {
    pub fn classify(&self, slack: f64) -> DetectionClass {
        let within = (1.0 - slack..=1.0 + slack).contains(&self.area_ratio);
        if self.jaccard >= MIN_JACCARD && within {
            DetectionClass::Correct
        } else if self.area_ratio > 1.0 + slack {
            DetectionClass::More
        } else {
            DetectionClass::Less
        }
    }
}

pub fn validate_slack(slack: f64) -> Result<()> {
    if !(slack > 0.0 && slack < 1.0) {
        return Err(Error::InvalidConfig(format!("slack must lie in (0, 1), got {slack}")));
    }
    Ok(())
}

/// Correct when Jaccard ≥ 0.8 and the area ratio is within `1 ± slack`;
/// otherwise More if the prediction is too large, else Less.
pub fn classify_detection(pred: &BinaryMask, truth: &BinaryMask, slack: f64) -> Result<DetectionClass> {
    validate_slack(slack)?;
    Ok(detection_metrics(pred, truth)?.classify(slack))
}
