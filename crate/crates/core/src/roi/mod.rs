//! Cervix region-of-interest extraction by clustering Lab chromaticity.

mod detection;
mod kmeans;

pub use detection::{
    classify_detection, detection_metrics, validate_slack, DetectionClass, DetectionMetrics, DEFAULT_SLACK, MIN_JACCARD,
};
pub use kmeans::{initial_indices, kmeans, nearest, ClusterModel, MAX_ITERATIONS};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::imagecore::{connected_components, largest_component, BinaryMask, BoundingBox, Connectivity, LabImage};

/// Images with more pixels than this are clustered on a decimated grid.
pub const MAX_CLUSTER_SAMPLES: usize = 256 * 256;

/// Chromaticity of one pixel, with its position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub a: f64,
    pub b: f64,
    pub x: u32,
    pub y: u32,
}

impl FeatureVector {
    pub fn ab(&self) -> [f64; 2] {
        [self.a, self.b]
    }
}

/// One `(a, b)` vector per pixel in row-major order; lightness is dropped.
pub fn extract_features(lab: &LabImage) -> Vec<FeatureVector> {
    let w = lab.width();
    lab.values()
        .iter()
        .enumerate()
        .map(|(i, v)| FeatureVector {
            a: v.a,
            b: v.b,
            x: (i % w as usize) as u32,
            y: (i / w as usize) as u32,
        })
        .collect()
}

/// Smallest stride `s` such that the `s`-decimated grid holds at most
/// [`MAX_CLUSTER_SAMPLES`] pixels.
pub fn sampling_stride(width: u32, height: u32) -> u32 {
    let mut s = 1u32;
    while (width.div_ceil(s) as usize) * (height.div_ceil(s) as usize) > MAX_CLUSTER_SAMPLES {
        s += 1;
    }
    s
}

/// Cluster an image's features and assign every pixel to the converged
/// means. `features` must be the full row-major feature list of a
/// `width × height` image.
pub fn segment(features: &[FeatureVector], width: u32, height: u32, k: usize, seed: u64) -> Result<ClusterModel> {
    assert_eq!(features.len(), width as usize * height as usize);
    let stride = sampling_stride(width, height);
    if stride == 1 {
        return kmeans(features, k, seed);
    }
    let sample: Vec<FeatureVector> = features
        .iter()
        .filter(|f| f.x % stride == 0 && f.y % stride == 0)
        .copied()
        .collect();
    let mut model = kmeans(&sample, k, seed)?;
    model.assignments = features.iter().map(|f| nearest(f.ab(), &model.means)).collect();
    Ok(model)
}

/// Pick the cluster whose member pixels sit closest, on average, to the
/// image centre, among clusters on the red side of the a axis. If no
/// cluster has `a > 0` every non-empty cluster is eligible. Lowest index
/// wins ties.
pub fn select_cervix_cluster(model: &ClusterModel, width: u32, height: u32) -> usize {
    assert_eq!(model.assignments.len(), width as usize * height as usize);
    let cx = (width as f64 - 1.0) / 2.0;
    let cy = (height as f64 - 1.0) / 2.0;
    let mut dist_sum = vec![0.0f64; model.k];
    let mut counts = vec![0usize; model.k];
    for (i, &c) in model.assignments.iter().enumerate() {
        let x = (i % width as usize) as f64;
        let y = (i / width as usize) as f64;
        dist_sum[c] += ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
        counts[c] += 1;
    }

    let pick = |red_only: bool| {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..model.k {
            if counts[j] == 0 || (red_only && model.means[j][0] <= 0.0) {
                continue;
            }
            let d = dist_sum[j] / counts[j] as f64;
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        best.map(|(j, _)| j)
    };
    pick(true).or_else(|| pick(false)).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoiReport {
    pub roi_mask: BinaryMask,
    pub bbox: BoundingBox,
    pub area_fraction: f64,
    pub chosen_cluster: usize,
    /// Connected pieces of the chosen cluster before keeping the largest.
    pub component_count: usize,
}

/// Serializable part of [`RoiReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoiSummary {
    pub bbox: BoundingBox,
    pub pixel_count: usize,
    pub area_fraction: f64,
    pub chosen_cluster: usize,
    pub component_count: usize,
}

impl RoiReport {
    pub fn summary(&self) -> RoiSummary {
        RoiSummary {
            bbox: self.bbox,
            pixel_count: self.roi_mask.count(),
            area_fraction: self.area_fraction,
            chosen_cluster: self.chosen_cluster,
            component_count: self.component_count,
        }
    }
}

pub fn cluster_mask(model: &ClusterModel, cluster: usize, width: u32, height: u32) -> Result<BinaryMask> {
    BinaryMask::new(width, height, model.assignments.iter().map(|&c| c == cluster).collect())
}

/// Keep the largest 8-connected piece of the chosen cluster.
pub fn extract_roi(model: &ClusterModel, chosen: usize, width: u32, height: u32) -> Result<RoiReport> {
    extract_roi_with(model, chosen, width, height, Connectivity::Eight)
}

pub fn extract_roi_with(
    model: &ClusterModel,
    chosen: usize,
    width: u32,
    height: u32,
    connectivity: Connectivity,
) -> Result<RoiReport> {
    if chosen >= model.k {
        return Err(Error::InvalidConfig(format!(
            "cluster {chosen} out of range for k={}",
            model.k
        )));
    }
    let members = cluster_mask(model, chosen, width, height)?;
    let components = connected_components(&members, connectivity);
    let largest = largest_component(&components).ok_or(Error::EmptyRoi { cluster: chosen })?;
    let roi_mask = BinaryMask::from_points(width, height, largest.pixels.iter().copied())?;
    let bbox = BoundingBox::of_points(largest.pixels.iter().copied()).expect("component is non-empty");
    Ok(RoiReport {
        area_fraction: largest.size() as f64 / (width as f64 * height as f64),
        roi_mask,
        bbox,
        chosen_cluster: chosen,
        component_count: components.len(),
    })
}
