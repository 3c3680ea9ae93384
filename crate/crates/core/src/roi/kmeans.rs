//! Lloyd's k-means on (a, b) chromaticity vectors.
//!
//! Starting means are `k` distinct feature vectors drawn with a seeded RNG.
//! Each pass assigns every vector to its nearest mean (squared Euclidean,
//! lowest index on ties), then moves each mean to the centroid of its
//! cluster. Passes repeat until no assignment changes.
//!
//! A cluster left empty is re-seeded with the vector lying farthest from
//! its own cluster mean. A hard cap of [`MAX_ITERATIONS`] guards against
//! floating-point flutter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::FeatureVector;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterModel {
    pub k: usize,
    /// Cluster means `[a, b]`.
    pub means: Vec<[f64; 2]>,
    /// Cluster index per feature (or per pixel once projected to a full image).
    pub assignments: Vec<usize>,
    /// Number of assignment passes performed.
    pub iterations: usize,
    /// False when the iteration cap stopped the loop.
    pub converged: bool,
    /// Within-cluster sum of squares after each assignment pass.
    pub objective_history: Vec<f64>,
}

impl ClusterModel {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignments {
            sizes[c] += 1;
        }
        sizes
    }
}

#[inline]
fn sq_dist(p: [f64; 2], m: [f64; 2]) -> f64 {
    let da = p[0] - m[0];
    let db = p[1] - m[1];
    da * da + db * db
}

/// Index of the nearest mean; the first one wins ties.
#[inline]
pub fn nearest(p: [f64; 2], means: &[[f64; 2]]) -> usize {
    let mut best = 0;
    let mut best_d = sq_dist(p, means[0]);
    for (j, &m) in means.iter().enumerate().skip(1) {
        let d = sq_dist(p, m);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

/// The `k` distinct feature indices used as starting means.
pub fn initial_indices(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::index::sample(&mut rng, n, k).into_vec()
}

fn objective(points: &[[f64; 2]], means: &[[f64; 2]], assignments: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(&p, &c)| sq_dist(p, means[c]))
        .sum()
}

pub fn kmeans(features: &[FeatureVector], k: usize, seed: u64) -> Result<ClusterModel> {
    let points: Vec<[f64; 2]> = features.iter().map(FeatureVector::ab).collect();
    kmeans_points(&points, k, seed)
}

pub(crate) fn kmeans_points(points: &[[f64; 2]], k: usize, seed: u64) -> Result<ClusterModel> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if points.len() < k {
        return Err(Error::InsufficientData {
            k,
            available: points.len(),
        });
    }

    let mut means: Vec<[f64; 2]> = initial_indices(points.len(), k, seed)
        .into_iter()
        .map(|i| points[i])
        .collect();
    let mut assignments: Vec<usize> = points.iter().map(|&p| nearest(p, &means)).collect();
    let mut history = vec![objective(points, &means, &assignments)];
    let mut iterations = 1;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        update_means(points, &assignments, &mut means);
        iterations += 1;
        let next: Vec<usize> = points.iter().map(|&p| nearest(p, &means)).collect();
        history.push(objective(points, &means, &next));
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
    }

    Ok(ClusterModel {
        k,
        means,
        assignments,
        iterations,
        converged,
        objective_history: history,
    })
}

fn update_means(points: &[[f64; 2]], assignments: &[usize], means: &mut [[f64; 2]]) {
    let k = means.len();
    let mut sums = vec![[0.0f64; 2]; k];
    let mut counts = vec![0usize; k];
    for (&p, &c) in points.iter().zip(assignments) {
        sums[c][0] += p[0];
        sums[c][1] += p[1];
        counts[c] += 1;
    }
    for j in 0..k {
        if counts[j] > 0 {
            means[j] = [sums[j][0] / counts[j] as f64, sums[j][1] / counts[j] as f64];
        }
    }
    let mut taken = vec![false; points.len()];
    for j in 0..k {
        if counts[j] > 0 {
            continue;
        }
        let mut far = None;
        let mut far_d = -1.0;
        for (i, (&p, &c)) in points.iter().zip(assignments).enumerate() {
            let d = sq_dist(p, means[c]);
            if !taken[i] && d > far_d {
                far = Some(i);
                far_d = d;
            }
        }
        if let Some(i) = far {
            taken[i] = true;
            means[j] = points[i];
        }
    }
}
