//! Synthetic cervigrams with known glare and ROI masks.
//!
//! Each image is a shaded pink ellipse (the cervix stand-in) on a dark
//! surround inside a black frame, with saturated square glare speckles on
//! the tissue and a bright striped bar near the bottom edge standing in for
//! burned-in text. Optional whitish patches on the tissue mimic acetowhite
//! lesions. Everything derives from a single seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{BinaryMask, ImageRgb8};

/// Clearance kept between speckles, and between a speckle and the tissue edge.
const SPECKLE_CLEARANCE: f64 = 8.0;
const PLACEMENT_ATTEMPTS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub width: u32,
    pub height: u32,
    /// Nominal horizontal semi-axis of the tissue ellipse, pixels.
    pub semi_axis_x: f64,
    pub semi_axis_y: f64,
    /// Per-image relative jitter applied to both semi-axes.
    pub axis_jitter: f64,
    /// Maximum centre offset from the image centre, pixels.
    pub center_jitter: f64,
    /// Maximum rotation of the ellipse, radians.
    pub max_rotation: f64,
    pub tissue_rgb: [u8; 3],
    pub background_rgb: [u8; 3],
    pub frame_rgb: [u8; 3],
    pub frame_width: u32,
    /// Uniform per-channel noise amplitude.
    pub noise: u8,
    pub speckles: u32,
    /// Side of each square speckle.
    pub speckle_size: u32,
    pub text_bar: bool,
    pub bar_rgb: [u8; 3],
    pub acetowhite_patches: u32,
    pub acetowhite_rgb: [u8; 3],
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            semi_axis_x: 200.0,
            semi_axis_y: 165.0,
            axis_jitter: 0.08,
            center_jitter: 14.0,
            max_rotation: 0.3,
            tissue_rgb: [214, 118, 128],
            background_rgb: [48, 38, 40],
            frame_rgb: [6, 6, 6],
            frame_width: 8,
            noise: 6,
            speckles: 12,
            speckle_size: 3,
            text_bar: true,
            bar_rgb: [205, 205, 190],
            acetowhite_patches: 0,
            acetowhite_rgb: [236, 190, 196],
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.width == 0 || self.height == 0 {
            return bad(format!("image size {}x{} is empty", self.width, self.height));
        }
        for (name, v) in [("semi_axis_x", self.semi_axis_x), ("semi_axis_y", self.semi_axis_y)] {
            if !(v.is_finite() && v >= 1.0) {
                return bad(format!("{name} must be at least 1 pixel, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.axis_jitter) {
            return bad(format!("axis_jitter must lie in [0, 1), got {}", self.axis_jitter));
        }
        if !(self.center_jitter.is_finite() && self.center_jitter >= 0.0) {
            return bad(format!(
                "center_jitter must be non-negative, got {}",
                self.center_jitter
            ));
        }
        if !(self.max_rotation.is_finite() && self.max_rotation >= 0.0) {
            return bad(format!("max_rotation must be non-negative, got {}", self.max_rotation));
        }
        if self.speckles > 0 && self.speckle_size == 0 {
            return bad("speckle_size must be positive when speckles are requested".into());
        }
        if 2 * self.frame_width >= self.width.min(self.height) {
            return bad(format!("frame width {} leaves no interior", self.frame_width));
        }
        Ok(())
    }
}

/// One generated image and its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSample {
    pub image: ImageRgb8,
    /// Exactly the saturated speckle pixels.
    pub glare_truth: BinaryMask,
    /// Tissue ellipse pixels inside the frame.
    pub roi_truth: BinaryMask,
}

#[derive(Debug, Clone, Copy)]
struct Ellipse {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    cos: f64,
    sin: f64,
}

impl Ellipse {
    /// Squared normalised radius; `<= 1` inside.
    fn rho2(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.cx;
        let dy = y - self.cy;
        let u = dx * self.cos + dy * self.sin;
        let v = -dx * self.sin + dy * self.cos;
        (u / self.rx).powi(2) + (v / self.ry).powi(2)
    }

    /// Inside, and at least `margin` pixels from the edge (approximately).
    fn contains_with_margin(&self, x: f64, y: f64, margin: f64) -> bool {
        let shrink = Ellipse {
            rx: self.rx - margin,
            ry: self.ry - margin,
            ..*self
        };
        shrink.rx > 0.0 && shrink.ry > 0.0 && shrink.rho2(x, y) <= 1.0
    }
}

fn jitter(rng: &mut ChaCha8Rng, amplitude: f64) -> f64 {
    if amplitude > 0.0 {
        rng.random_range(-amplitude..=amplitude)
    } else {
        0.0
    }
}

fn noisy(rng: &mut ChaCha8Rng, base: [f64; 3], noise: u8) -> [u8; 3] {
    let n = noise as i32;
    base.map(|c| {
        let d = if n > 0 { rng.random_range(-n..=n) } else { 0 };
        (c.round() as i32 + d).clamp(0, 255) as u8
    })
}

pub fn generate_synthetic(seed: u64, spec: &SyntheticSpec) -> Result<SyntheticSample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (spec.width, spec.height);
    let fw = spec.frame_width;

    let scale_x = 1.0 + jitter(&mut rng, spec.axis_jitter);
    let scale_y = 1.0 + jitter(&mut rng, spec.axis_jitter);
    let angle = jitter(&mut rng, spec.max_rotation);
    let ellipse = Ellipse {
        cx: (w as f64 - 1.0) / 2.0 + jitter(&mut rng, spec.center_jitter),
        cy: (h as f64 - 1.0) / 2.0 + jitter(&mut rng, spec.center_jitter),
        rx: spec.semi_axis_x * scale_x,
        ry: spec.semi_axis_y * scale_y,
        cos: angle.cos(),
        sin: angle.sin(),
    };

    let in_frame = |x: u32, y: u32| x >= fw && y >= fw && x < w - fw && y < h - fw;
    let roi_truth = BinaryMask::from_fn(w, h, |x, y| in_frame(x, y) && ellipse.rho2(x as f64, y as f64) <= 1.0)?;
    if roi_truth.is_empty() {
        return Err(Error::InvalidSpec("tissue ellipse does not intersect the image".into()));
    }

    // Acetowhite patches: discs well inside the tissue.
    let mut patches: Vec<(f64, f64, f64)> = Vec::new();
    for _ in 0..spec.acetowhite_patches {
        let r = rng.random_range(12.0..=28.0);
        for _ in 0..PLACEMENT_ATTEMPTS {
            let px = rng.random_range(0.0..w as f64);
            let py = rng.random_range(0.0..h as f64);
            if ellipse.contains_with_margin(px, py, r + 10.0) {
                patches.push((px, py, r));
                break;
            }
        }
    }

    let bar = spec.text_bar.then(|| {
        let x0 = fw + w / 20;
        let x1 = x0 + w * 3 / 10;
        let y1 = h - fw - h / 40;
        let y0 = y1.saturating_sub((h / 32).max(4));
        (x0, y0, x1, y1)
    });
    let in_bar = |x: u32, y: u32| {
        bar.is_some_and(|(x0, y0, x1, y1)| {
            (x0..x1).contains(&x) && (y0..y1).contains(&y) && (x - x0) % 6 < 4 && !roi_truth.get(x, y)
        })
    };

    let tissue = spec.tissue_rgb.map(f64::from);
    let aw = spec.acetowhite_rgb.map(f64::from);
    let image = ImageRgb8::from_fn(w, h, |x, y| {
        if !in_frame(x, y) {
            return spec.frame_rgb;
        }
        if roi_truth.get(x, y) {
            let rho2 = ellipse.rho2(x as f64, y as f64);
            // Falls off towards the rim, as under a ring light.
            let shade = 1.0 - 0.22 * rho2;
            let in_patch = patches
                .iter()
                .any(|&(px, py, r)| (x as f64 - px).powi(2) + (y as f64 - py).powi(2) <= r * r);
            let base = if in_patch { aw } else { tissue };
            return noisy(&mut rng, base.map(|c| c * shade), spec.noise);
        }
        if in_bar(x, y) {
            return noisy(&mut rng, spec.bar_rgb.map(f64::from), spec.noise);
        }
        noisy(&mut rng, spec.background_rgb.map(f64::from), spec.noise)
    })?;

    // Speckles: non-overlapping squares kept clear of each other and of the
    // tissue edge.
    let side = spec.speckle_size;
    let mut placed: Vec<(u32, u32)> = Vec::new();
    for _ in 0..spec.speckles {
        let mut ok = None;
        for _ in 0..PLACEMENT_ATTEMPTS {
            if w <= side || h <= side {
                break;
            }
            let x = rng.random_range(0..=w - side);
            let y = rng.random_range(0..=h - side);
            let corners = [
                (x, y),
                (x + side - 1, y),
                (x, y + side - 1),
                (x + side - 1, y + side - 1),
            ];
            let inside = corners.iter().all(|&(cx, cy)| {
                in_frame(cx, cy) && ellipse.contains_with_margin(cx as f64, cy as f64, SPECKLE_CLEARANCE)
            });
            let clear = placed.iter().all(|&(px, py)| {
                let gap = side as f64 + SPECKLE_CLEARANCE;
                (x as f64 - px as f64).abs() >= gap || (y as f64 - py as f64).abs() >= gap
            });
            if inside && clear {
                ok = Some((x, y));
                break;
            }
        }
        let (x, y) = ok.ok_or_else(|| Error::InvalidSpec(format!("no room for {} speckles", spec.speckles)))?;
        placed.push((x, y));
    }

    let mut image = image;
    let mut glare_truth = BinaryMask::empty(w, h)?;
    for &(x0, y0) in &placed {
        for y in y0..y0 + side {
            for x in x0..x0 + side {
                image.put(x, y, [255, 255, 255]);
                glare_truth.set(x, y, true);
            }
        }
    }

    Ok(SyntheticSample {
        image,
        glare_truth,
        roi_truth,
    })
}
