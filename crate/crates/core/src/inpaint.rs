//! Harmonic inpainting: masked pixels are replaced by the solution of the
//! discrete Laplace equation whose Dirichlet data is the ring of unmasked
//! pixels around each masked region.
//!
//! The 5-point stencil makes every filled value the mean of its in-frame
//! 4-neighbours. Masked pixels on the frame edge average only the neighbours
//! that exist, which amounts to a zero-flux condition at the frame. The
//! system is solved in place with successive over-relaxation, sweeping only
//! the masked pixels in row-major order. Sweeping stops once the mean-value
//! residual is within tolerance and the error still remaining, extrapolated
//! from the geometric decay of the per-sweep updates, is within it too. The
//! residual alone understates the error on large regions, where the slowest
//! modes shrink by only a few percent per sweep.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{connected_components, neighbors, split_planes, BinaryMask, Connectivity, GrayPlane, ImageRgb8};

const N4: [(i32, i32); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

/// Sweeps over which the contraction rate is measured.
const RATE_WINDOW: usize = 5;

/// Geometric-series bound `δ·ρ/(1 − ρ)` on the remaining error, with `ρ`
/// the mean per-sweep contraction of the largest update over the window.
fn remaining_error(updates: &VecDeque<f64>) -> f64 {
    let (Some(&first), Some(&last)) = (updates.front(), updates.back()) else {
        return f64::INFINITY;
    };
    if last == 0.0 {
        return 0.0;
    }
    if updates.len() <= RATE_WINDOW {
        return f64::INFINITY;
    }
    let rho = (last / first).powf(1.0 / RATE_WINDOW as f64);
    if rho < 1.0 {
        last * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    }
}

/// Share of the frame above which a single fill region is reported.
const LARGE_REGION_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarmonicSolverConfig {
    /// Stop once the largest mean-value residual drops to this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// SOR factor, strictly between 0 and 2.
    pub relaxation_factor: f64,
}

impl Default for HarmonicSolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            max_iterations: 10_000,
            relaxation_factor: 1.8,
        }
    }
}

impl HarmonicSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.relaxation_factor > 0.0 && self.relaxation_factor < 2.0) {
            return Err(Error::InvalidConfig(format!(
                "relaxation_factor must lie in (0, 2), got {}",
                self.relaxation_factor
            )));
        }
        Ok(())
    }
}

/// Outcome of one Laplace solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    /// Distance still to go, extrapolated from the decay of the per-sweep
    /// update; infinite until enough sweeps have run to estimate the rate.
    pub error_estimate: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FillResult {
    pub plane: GrayPlane,
    pub iterations_used: usize,
    pub final_residual: f64,
    pub converged: bool,
}

/// Precomputed 5-point system for one mask. Reusable across channels.
#[derive(Debug, Clone)]
pub struct LaplaceSystem {
    width: u32,
    height: u32,
    /// Flat indices of masked pixels, row-major.
    unknowns: Vec<usize>,
    /// `neighbors[offsets[i]..offsets[i + 1]]` are the in-frame 4-neighbours of unknown `i`.
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    regions: Vec<Region>,
}

#[derive(Debug, Clone)]
struct Region {
    /// Positions into `LaplaceSystem::unknowns`.
    members: Vec<usize>,
    /// Flat indices of the unmasked ring.
    ring: Vec<usize>,
}

impl LaplaceSystem {
    /// Fails when a masked region has no unmasked 4-neighbour, which can
    /// only happen when the mask covers the whole frame.
    pub fn new(mask: &BinaryMask) -> Result<Self> {
        let (w, h) = mask.dimensions();
        let bits = mask.bits();
        let flat = |x: u32, y: u32| y as usize * w as usize + x as usize;

        let unknowns: Vec<usize> = (0..bits.len()).filter(|&i| bits[i]).collect();
        let mut position = vec![usize::MAX; bits.len()];
        for (k, &i) in unknowns.iter().enumerate() {
            position[i] = k;
        }

        let mut offsets = Vec::with_capacity(unknowns.len() + 1);
        let mut nbrs = Vec::with_capacity(unknowns.len() * 4);
        offsets.push(0);
        for &i in &unknowns {
            let (x, y) = ((i % w as usize) as u32, (i / w as usize) as u32);
            nbrs.extend(neighbors(x, y, w, h, &N4).map(|(nx, ny)| flat(nx, ny)));
            offsets.push(nbrs.len());
        }

        let total = bits.len() as f64;
        let mut on_ring = vec![false; bits.len()];
        let mut regions = Vec::new();
        for comp in connected_components(mask, Connectivity::Four) {
            let mut ring = Vec::new();
            for &(x, y) in &comp.pixels {
                for (nx, ny) in neighbors(x, y, w, h, &N4) {
                    let j = flat(nx, ny);
                    if !bits[j] && !on_ring[j] {
                        on_ring[j] = true;
                        ring.push(j);
                    }
                }
            }
            let (x, y) = comp.pixels[0];
            if ring.is_empty() {
                return Err(Error::NoDirichletData { x, y });
            }
            for &j in &ring {
                on_ring[j] = false;
            }
            let fraction = comp.size() as f64 / total;
            if fraction > LARGE_REGION_FRACTION {
                log::warn!(
                    "fill region at ({x},{y}) covers {:.1}% of the frame; inpainting it anyway",
                    fraction * 100.0
                );
            }
            let members = comp.pixels.iter().map(|&(x, y)| position[flat(x, y)]).collect();
            regions.push(Region { members, ring });
        }

        Ok(Self {
            width: w,
            height: h,
            unknowns,
            offsets,
            neighbors: nbrs,
            regions,
        })
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn unknown_count(&self) -> usize {
        self.unknowns.len()
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    #[inline]
    fn neighbor_mean(&self, values: &[f64], k: usize) -> f64 {
        let nb = &self.neighbors[self.offsets[k]..self.offsets[k + 1]];
        nb.iter().map(|&j| values[j]).sum::<f64>() / nb.len() as f64
    }

    /// Largest `|value - mean(4-neighbours)|` over the masked pixels.
    pub fn residual(&self, values: &[f64]) -> f64 {
        (0..self.unknowns.len())
            .map(|k| (values[self.unknowns[k]] - self.neighbor_mean(values, k)).abs())
            .fold(0.0, f64::max)
    }

    /// Solve in place. Unmasked entries of `values` are read, never written.
    /// Masked entries start from the mean of their region's ring.
    ///
    /// Values may be any finite reals; no clamping happens here.
    pub fn solve(&self, values: &mut [f64], cfg: &HarmonicSolverConfig) -> SolveStats {
        assert_eq!(values.len(), self.width as usize * self.height as usize);
        for region in &self.regions {
            let start = region.ring.iter().map(|&j| values[j]).sum::<f64>() / region.ring.len() as f64;
            for &k in &region.members {
                values[self.unknowns[k]] = start;
            }
        }

        let omega = cfg.relaxation_factor;
        let mut residual = self.residual(values);
        let mut updates: VecDeque<f64> = VecDeque::with_capacity(RATE_WINDOW + 1);
        let mut error_estimate = if residual > cfg.tolerance { f64::INFINITY } else { 0.0 };
        let mut iterations = 0;
        while (residual > cfg.tolerance || error_estimate > cfg.tolerance) && iterations < cfg.max_iterations {
            let mut largest = 0.0f64;
            for k in 0..self.unknowns.len() {
                let mean = self.neighbor_mean(values, k);
                let v = &mut values[self.unknowns[k]];
                let step = omega * (mean - *v);
                *v += step;
                largest = largest.max(step.abs());
            }
            iterations += 1;
            residual = self.residual(values);
            if updates.len() > RATE_WINDOW {
                updates.pop_front();
            }
            updates.push_back(largest);
            error_estimate = remaining_error(&updates);
        }
        SolveStats {
            iterations,
            residual,
            error_estimate,
            converged: residual <= cfg.tolerance,
        }
    }
}

/// Harmonic fill of one `[0, 1]` plane over `mask`. Filled values are
/// clamped to `[0, 1]`; unmasked values are returned untouched.
///
/// Running out of iterations is not an error: the result carries
/// `converged == false`.
pub fn harmonic_fill(plane: &GrayPlane, mask: &BinaryMask, cfg: &HarmonicSolverConfig) -> Result<FillResult> {
    cfg.validate()?;
    if plane.dimensions() != mask.dimensions() {
        return Err(Error::DimensionMismatch {
            left: plane.dimensions(),
            right: mask.dimensions(),
        });
    }
    let system = LaplaceSystem::new(mask)?;
    Ok(fill_with(&system, plane, cfg).0)
}

fn fill_with(system: &LaplaceSystem, plane: &GrayPlane, cfg: &HarmonicSolverConfig) -> (FillResult, SolveStats) {
    let mut values = plane.values().to_vec();
    let stats = system.solve(&mut values, cfg);
    for &i in &system.unknowns {
        values[i] = values[i].clamp(0.0, 1.0);
    }
    let (w, h) = plane.dimensions();
    let fill = FillResult {
        plane: GrayPlane::from_values_unchecked(w, h, values),
        iterations_used: stats.iterations,
        final_residual: stats.residual,
        converged: stats.converged,
    };
    (fill, stats)
}

/// Round-half-up back to 8 bits.
#[inline]
pub fn quantize(v: f64) -> u8 {
    (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Inpainted image plus per-channel solver statistics (R, G, B).
#[derive(Debug, Clone)]
pub struct SpecularRemoval {
    pub image: ImageRgb8,
    pub channels: [SolveStats; 3],
}

impl SpecularRemoval {
    pub fn max_iterations(&self) -> usize {
        self.channels.iter().map(|s| s.iterations).max().unwrap_or(0)
    }

    pub fn converged(&self) -> bool {
        self.channels.iter().all(|s| s.converged)
    }
}

/// Fill R, G and B independently over `mask`. Pixels outside the mask are
/// copied bit for bit.
pub fn remove_specular(img: &ImageRgb8, mask: &BinaryMask, cfg: &HarmonicSolverConfig) -> Result<ImageRgb8> {
    remove_specular_detailed(img, mask, cfg).map(|r| r.image)
}

pub fn remove_specular_detailed(
    img: &ImageRgb8,
    mask: &BinaryMask,
    cfg: &HarmonicSolverConfig,
) -> Result<SpecularRemoval> {
    cfg.validate()?;
    if img.dimensions() != mask.dimensions() {
        return Err(Error::DimensionMismatch {
            left: img.dimensions(),
            right: mask.dimensions(),
        });
    }
    let idle = SolveStats {
        iterations: 0,
        residual: 0.0,
        error_estimate: 0.0,
        converged: true,
    };
    if mask.is_empty() {
        return Ok(SpecularRemoval {
            image: img.clone(),
            channels: [idle; 3],
        });
    }

    let system = LaplaceSystem::new(mask)?;
    let (r, g, b) = split_planes(img);
    let fills = [r, g, b].map(|p| fill_with(&system, &p, cfg));

    let mut out = img.clone();
    let pixels = out.pixels_mut();
    for &i in &system.unknowns {
        pixels[i] = std::array::from_fn(|c| quantize(fills[c].0.plane.values()[i]));
    }
    let channels = fills.map(|(_, stats)| stats);
    Ok(SpecularRemoval { image: out, channels })
}

/// Radially symmetric harmonic function on `Rⁿ \ {0}`:
/// `c1·ln r + c2` for `n = 2`, `c1 / ((2 − n)·r^(n−2)) + c2` for `n ≥ 3`.
pub fn radial_fundamental_solution(r: f64, n: u32, c1: f64, c2: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
    }
    match n {
        0 | 1 => Err(Error::Domain(format!("dimension must be at least 2, got {n}"))),
        2 => Ok(c1 * r.ln() + c2),
        _ => {
            let k = n as i32 - 2;
            Ok(c1 / ((2.0 - n as f64) * r.powi(k)) + c2)
        }
    }
}
