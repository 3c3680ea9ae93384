//! Glare detection: white pixels in all three planes, then dilation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{dilate, unit, BinaryMask, ImageRgb8, StructuringElement};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpecularConfig {
    /// Per-channel cutoff on `channel / 255`.
    pub white_threshold: f64,
    /// Disk radius used to grow the raw glare mask.
    pub se_radius: u32,
}

impl Default for SpecularConfig {
    fn default() -> Self {
        Self {
            white_threshold: 0.90,
            se_radius: 2,
        }
    }
}

impl SpecularConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.white_threshold > 0.0 && self.white_threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "white_threshold must lie in (0, 1], got {}",
                self.white_threshold
            )));
        }
        Ok(())
    }
}

#[inline]
pub fn is_white(rgb: [u8; 3], threshold: f64) -> bool {
    rgb.iter().all(|&c| unit(c) >= threshold)
}

/// Pixels whose R, G and B planes all reach the threshold.
pub fn detect_specular(img: &ImageRgb8, cfg: &SpecularConfig) -> BinaryMask {
    let bits = img.pixels().iter().map(|&p| is_white(p, cfg.white_threshold)).collect();
    BinaryMask::new(img.width(), img.height(), bits).expect("same dimensions as the image")
}

/// Grow the raw glare mask by a disk so the fill boundary sits on tissue.
pub fn build_inpaint_mask(raw: &BinaryMask, cfg: &SpecularConfig) -> BinaryMask {
    dilate(raw, &StructuringElement::disk(cfg.se_radius))
}
