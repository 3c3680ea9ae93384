use super::raster::BinaryMask;

/// Flat structuring element given as pixel offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    radius: u32,
    offsets: Vec<(i32, i32)>,
}

impl StructuringElement {
    /// Discrete disk: every offset with `dx² + dy² ≤ radius²`.
    pub fn disk(radius: u32) -> Self {
        let r = radius as i64;
        let mut offsets = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy <= r * r {
                    offsets.push((dx as i32, dy as i32));
                }
            }
        }
        Self { radius, offsets }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }
}

/// Binary dilation. Offsets falling outside the frame are dropped.
pub fn dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = mask.dimensions();
    let mut out = mask.clone();
    let bits = out.bits_mut();
    for (x, y) in mask.iter_set() {
        for &(dx, dy) in se.offsets() {
            let nx = x as i64 + dx as i64;
            let ny = y as i64 + dy as i64;
            if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                bits[ny as usize * w as usize + nx as usize] = true;
            }
        }
    }
    out
}
