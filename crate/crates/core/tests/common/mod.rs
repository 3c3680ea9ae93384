//! Independent reference implementations shared by the integration tests
//! and the acceptance target.

#![allow(dead_code)]

use cervipre::imagecore::BinaryMask;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Random disks and rectangles covering roughly `target` of the frame,
/// never the whole frame.
pub fn random_mask(rng: &mut impl Rng, w: u32, h: u32, target: f64) -> BinaryMask {
    let mut mask = BinaryMask::empty(w, h).unwrap();
    let goal = ((w * h) as f64 * target) as usize;
    while mask.count() < goal.max(1) {
        let cx = rng.random_range(0..w) as i64;
        let cy = rng.random_range(0..h) as i64;
        let r = rng.random_range(1..=(w.min(h) / 6).max(1)) as i64;
        let disk = rng.random_bool(0.5);
        for y in (cy - r).max(0)..=(cy + r).min(h as i64 - 1) {
            for x in (cx - r).max(0)..=(cx + r).min(w as i64 - 1) {
                if !disk || (x - cx).pow(2) + (y - cy).pow(2) <= r * r {
                    mask.set(x as u32, y as u32, true);
                }
            }
        }
    }
    if mask.count() == (w * h) as usize {
        mask.set(0, 0, false);
    }
    mask
}

/// Solve the 5-point system directly: each masked pixel equals the mean of
/// its in-frame 4-neighbours, unmasked pixels are fixed at `field`.
pub fn dense_harmonic(mask: &BinaryMask, field: &[f64]) -> Vec<f64> {
    let (w, h) = mask.dimensions();
    let idx = |x: u32, y: u32| (y * w + x) as usize;
    let unknowns: Vec<(u32, u32)> = mask.iter_set().collect();
    let mut slot = vec![usize::MAX; (w * h) as usize];
    for (k, &(x, y)) in unknowns.iter().enumerate() {
        slot[idx(x, y)] = k;
    }
    let n = unknowns.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for (k, &(x, y)) in unknowns.iter().enumerate() {
        let mut nbrs = Vec::new();
        if x > 0 {
            nbrs.push((x - 1, y));
        }
        if x + 1 < w {
            nbrs.push((x + 1, y));
        }
        if y > 0 {
            nbrs.push((x, y - 1));
        }
        if y + 1 < h {
            nbrs.push((x, y + 1));
        }
        a[(k, k)] = nbrs.len() as f64;
        for (nx, ny) in nbrs {
            let j = idx(nx, ny);
            if mask.get(nx, ny) {
                a[(k, slot[j])] -= 1.0;
            } else {
                b[k] += field[j];
            }
        }
    }
    let u = a.lu().solve(&b).expect("5-point system is nonsingular");
    let mut out = field.to_vec();
    for (k, &(x, y)) in unknowns.iter().enumerate() {
        out[idx(x, y)] = u[k];
    }
    out
}

/// Textbook Lloyd iteration written separately from the library, following
/// the same seeding, tie and empty-cluster conventions.
pub struct LloydOracle {
    pub assignments: Vec<usize>,
    pub means: Vec<[f64; 2]>,
    pub objectives: Vec<f64>,
}

pub fn lloyd(points: &[[f64; 2]], k: usize, seed: u64) -> LloydOracle {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let start = rand::seq::index::sample(&mut rng, points.len(), k);
    let mut means: Vec<[f64; 2]> = start.iter().map(|i| points[i]).collect();

    let d2 = |p: [f64; 2], m: [f64; 2]| (p[0] - m[0]) * (p[0] - m[0]) + (p[1] - m[1]) * (p[1] - m[1]);
    let assign = |means: &[[f64; 2]]| -> Vec<usize> {
        points
            .iter()
            .map(|&p| {
                let mut best = 0;
                for j in 1..means.len() {
                    if d2(p, means[j]) < d2(p, means[best]) {
                        best = j;
                    }
                }
                best
            })
            .collect()
    };
    let cost = |means: &[[f64; 2]], lab: &[usize]| -> f64 {
        let mut s = 0.0;
        for i in 0..points.len() {
            s += d2(points[i], means[lab[i]]);
        }
        s
    };

    let mut labels = assign(&means);
    let mut objectives = vec![cost(&means, &labels)];
    for _ in 1..cervipre::roi::MAX_ITERATIONS {
        let mut empty = Vec::new();
        for (j, mean) in means.iter_mut().enumerate() {
            let members: Vec<[f64; 2]> = (0..points.len())
                .filter(|&i| labels[i] == j)
                .map(|i| points[i])
                .collect();
            if members.is_empty() {
                empty.push(j);
                continue;
            }
            let mut sa = 0.0;
            let mut sb = 0.0;
            for p in &members {
                sa += p[0];
                sb += p[1];
            }
            *mean = [sa / members.len() as f64, sb / members.len() as f64];
        }
        let mut used = vec![false; points.len()];
        for j in empty {
            // Farthest point from its own (updated) mean; first one on ties.
            let mut pick: Option<usize> = None;
            for i in 0..points.len() {
                if used[i] {
                    continue;
                }
                let d = d2(points[i], means[labels[i]]);
                if pick.is_none_or(|q| d > d2(points[q], means[labels[q]])) {
                    pick = Some(i);
                }
            }
            if let Some(i) = pick {
                used[i] = true;
                means[j] = points[i];
            }
        }
        let next = assign(&means);
        objectives.push(cost(&means, &next));
        if next == labels {
            break;
        }
        labels = next;
    }
    LloydOracle {
        assignments: labels,
        means,
        objectives,
    }
}

/// Scalar sRGB → CIELAB straight from the reference formulas, using the
/// epsilon/kappa form of the lightness function.
pub fn lab_reference(rgb: [f64; 3]) -> [f64; 3] {
    let lin = |c: f64| {
        if c <= 0.04045 {
            c / 12.92
        } else {
            ((c + 0.055) / 1.055).powf(2.4)
        }
    };
    let (r, g, b) = (lin(rgb[0]), lin(rgb[1]), lin(rgb[2]));
    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    let (xr, yr, zr) = (x / 0.95047, y / 1.0, z / 1.08883);
    let eps = 216.0 / 24389.0;
    let kappa = 24389.0 / 27.0;
    let f = |t: f64| if t > eps { t.cbrt() } else { (kappa * t + 16.0) / 116.0 };
    let l = if yr > eps { 116.0 * yr.cbrt() - 16.0 } else { kappa * yr };
    [l.clamp(0.0, 100.0), 500.0 * (f(xr) - f(yr)), 200.0 * (f(yr) - f(zr))]
}

/// Five-point discrete Laplacian of `f` at `(x, y)` with spacing `h`.
pub fn discrete_laplacian(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h)
}
