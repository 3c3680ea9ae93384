//! Plane splitting and sRGB → XYZ (D65) → CIELAB conversion.

use std::sync::LazyLock;

use super::raster::{GrayPlane, ImageRgb8, Lab, LabImage};

/// Linear-light sRGB → XYZ, D65 white (IEC 61966-2-1).
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

/// D65 reference white.
pub const WHITE_D65: [f64; 3] = [0.950_47, 1.0, 1.088_83];

const DELTA: f64 = 6.0 / 29.0;

static LINEAR: LazyLock<[f64; 256]> = LazyLock::new(|| {
    let mut lut = [0.0; 256];
    for (v, slot) in lut.iter_mut().enumerate() {
        *slot = srgb_to_linear(v as f64 / 255.0);
    }
    lut
});

/// Normalised channel value, `channel / 255`.
#[inline]
pub fn unit(channel: u8) -> f64 {
    channel as f64 / 255.0
}

/// sRGB electro-optical transfer function on a `[0, 1]` value.
pub fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// Convert one 8-bit sRGB triple to CIELAB.
pub fn srgb8_to_lab(rgb: [u8; 3]) -> Lab {
    linear_to_lab(rgb.map(|c| LINEAR[c as usize]))
}

/// Convert an sRGB triple with components in `[0, 1]` to CIELAB.
pub fn srgb_to_lab(rgb: [f64; 3]) -> Lab {
    linear_to_lab(rgb.map(srgb_to_linear))
}

fn linear_to_lab(lin: [f64; 3]) -> Lab {
    let xyz: [f64; 3] = std::array::from_fn(|row| {
        RGB_TO_XYZ[row][0] * lin[0] + RGB_TO_XYZ[row][1] * lin[1] + RGB_TO_XYZ[row][2] * lin[2]
    });
    let fx = lab_f(xyz[0] / WHITE_D65[0]);
    let fy = lab_f(xyz[1] / WHITE_D65[1]);
    let fz = lab_f(xyz[2] / WHITE_D65[2]);
    Lab {
        // Rounding can leave black a hair below zero and white a hair above 100.
        l: (116.0 * fy - 16.0).clamp(0.0, 100.0),
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

/// Split into R, G and B planes, each scaled to `[0, 1]`.
pub fn split_planes(img: &ImageRgb8) -> (GrayPlane, GrayPlane, GrayPlane) {
    let (w, h) = img.dimensions();
    let plane = |c: usize| {
        let values = img.pixels().iter().map(|p| unit(p[c])).collect();
        GrayPlane::from_values_unchecked(w, h, values)
    };
    (plane(0), plane(1), plane(2))
}

pub fn rgb_to_lab(img: &ImageRgb8) -> LabImage {
    let values = img.pixels().iter().map(|&p| srgb8_to_lab(p)).collect();
    LabImage::from_values_unchecked(img.width(), img.height(), values)
}
