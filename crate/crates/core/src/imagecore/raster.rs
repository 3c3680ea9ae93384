//! Row-major raster types shared by every stage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_dims(width: u32, height: u32) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    Ok(width as usize * height as usize)
}

fn check_len(width: u32, height: u32, actual: usize) -> Result<()> {
    let expected = check_dims(width, height)?;
    if expected != actual {
        return Err(Error::PixelCountMismatch { expected, actual });
    }
    Ok(())
}

/// 8-bit sRGB color raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRgb8 {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl ImageRgb8 {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self> {
        check_len(width, height, pixels.len())?;
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self> {
        let n = check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            pixels: vec![rgb; n],
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Result<Self> {
        let n = check_dims(width, height)?;
        let mut pixels = Vec::with_capacity(n);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Ok(Self { width, height, pixels })
    }

    /// Build from a packed `RGBRGB...` byte buffer.
    pub fn from_raw(width: u32, height: u32, data: &[u8]) -> Result<Self> {
        let n = check_dims(width, height)?;
        if data.len() != n * 3 {
            return Err(Error::PixelCountMismatch {
                expected: n * 3,
                actual: data.len(),
            });
        }
        let pixels = data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Ok(Self { width, height, pixels })
    }

    pub fn to_raw(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[index(self.width, x, y)]
    }

    pub fn put(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = index(self.width, x, y);
        self.pixels[i] = rgb;
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [[u8; 3]] {
        &mut self.pixels
    }
}

/// One color plane, normalised to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayPlane {
    width: u32,
    height: u32,
    values: Vec<f64>,
}

impl GrayPlane {
    pub fn new(width: u32, height: u32, values: Vec<f64>) -> Result<Self> {
        check_len(width, height, values.len())?;
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(Error::ValueOutOfRange { index, value });
        }
        Ok(Self { width, height, values })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> f64) -> Result<Self> {
        let n = check_dims(width, height)?;
        let mut values = Vec::with_capacity(n);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.values[index(self.width, x, y)]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Caller guarantees every value is finite and within `[0, 1]`.
    pub(crate) fn from_values_unchecked(width: u32, height: u32, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width as usize * height as usize);
        Self { width, height, values }
    }
}

/// Per-pixel boolean raster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        check_len(width, height, bits.len())?;
        Ok(Self { width, height, bits })
    }

    pub fn empty(width: u32, height: u32) -> Result<Self> {
        let n = check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            bits: vec![false; n],
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Result<Self> {
        let n = check_dims(width, height)?;
        let mut bits = Vec::with_capacity(n);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Ok(Self { width, height, bits })
    }

    pub fn from_points(width: u32, height: u32, points: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut mask = Self::empty(width, height)?;
        for (x, y) in points {
            if x >= width || y >= height {
                return Err(Error::BoxOutOfBounds {
                    x0: x,
                    y0: y,
                    x1: x,
                    y1: y,
                    width,
                    height,
                });
            }
            mask.set(x, y, true);
        }
        Ok(mask)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[index(self.width, x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let i = index(self.width, x, y);
        self.bits[i] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Set pixel coordinates in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i % w as usize) as u32, (i / w as usize) as u32))
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dimensions() == other.dimensions() && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn intersection_count(&self, other: &BinaryMask) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(&a, &b)| a && b).count()
    }

    pub fn union_count(&self, other: &BinaryMask) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(&a, &b)| a || b).count()
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }
}

/// CIELAB triple.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    width: u32,
    height: u32,
    values: Vec<Lab>,
}

impl LabImage {
    pub fn new(width: u32, height: u32, values: Vec<Lab>) -> Result<Self> {
        check_len(width, height, values.len())?;
        for (index, v) in values.iter().enumerate() {
            let ok = v.l.is_finite() && v.a.is_finite() && v.b.is_finite() && (0.0..=100.0).contains(&v.l);
            if !ok {
                return Err(Error::ValueOutOfRange { index, value: v.l });
            }
        }
        Ok(Self { width, height, values })
    }

    pub(crate) fn from_values_unchecked(width: u32, height: u32, values: Vec<Lab>) -> Self {
        Self { width, height, values }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[Lab] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> Lab {
        self.values[index(self.width, x, y)]
    }
}

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl BoundingBox {
    pub fn new(x0: u32, y0: u32, x1: u32, y1: u32) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn full(width: u32, height: u32) -> Self {
        Self::new(0, 0, width.saturating_sub(1), height.saturating_sub(1))
    }

    /// Tight box around the set pixels, `None` for an empty mask.
    pub fn of_mask(mask: &BinaryMask) -> Option<Self> {
        Self::of_points(mask.iter_set())
    }

    pub fn of_points(points: impl IntoIterator<Item = (u32, u32)>) -> Option<Self> {
        points.into_iter().fold(None, |acc, (x, y)| {
            Some(match acc {
                None => Self::new(x, y, x, y),
                Some(b) => Self::new(b.x0.min(x), b.y0.min(y), b.x1.max(x), b.y1.max(y)),
            })
        })
    }

    pub fn width(&self) -> u32 {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> u32 {
        self.y1 - self.y0 + 1
    }

    pub fn fits(&self, width: u32, height: u32) -> bool {
        self.x0 <= self.x1 && self.y0 <= self.y1 && self.x1 < width && self.y1 < height
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

#[inline]
pub(crate) fn index(width: u32, x: u32, y: u32) -> usize {
    y as usize * width as usize + x as usize
}
