//! Connected components and boundary rings of binary masks.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::raster::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Connectivity {
    #[serde(rename = "4")]
    Four,
    #[default]
    #[serde(rename = "8")]
    Eight,
}

const N4: [(i32, i32); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
const N8: [(i32, i32); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

impl Connectivity {
    pub fn offsets(self) -> &'static [(i32, i32)] {
        match self {
            Connectivity::Four => &N4,
            Connectivity::Eight => &N8,
        }
    }

    pub fn from_count(n: u32) -> Option<Self> {
        match n {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }

    pub fn count(self) -> u32 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

/// A maximal connected set of mask pixels. `pixels` is row-major sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: usize,
    pub pixels: Vec<(u32, u32)>,
}

impl Component {
    pub fn size(&self) -> usize {
        self.pixels.len()
    }
}

/// In-frame neighbours of `(x, y)` under the given offsets.
#[inline]
pub(crate) fn neighbors(
    x: u32,
    y: u32,
    width: u32,
    height: u32,
    offsets: &'static [(i32, i32)],
) -> impl Iterator<Item = (u32, u32)> {
    offsets.iter().filter_map(move |&(dx, dy)| {
        let nx = x as i64 + dx as i64;
        let ny = y as i64 + dy as i64;
        (nx >= 0 && ny >= 0 && nx < width as i64 && ny < height as i64).then_some((nx as u32, ny as u32))
    })
}

/// Label components by breadth-first flood fill. Ids follow the row-major
/// position of each component's first pixel.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> Vec<Component> {
    let (w, h) = mask.dimensions();
    let mut seen = vec![false; mask.bits().len()];
    let mut queue = VecDeque::new();
    let mut out = Vec::new();

    for (sx, sy) in mask.iter_set() {
        let start = sy as usize * w as usize + sx as usize;
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back((sx, sy));
        let mut pixels = Vec::new();
        while let Some((x, y)) = queue.pop_front() {
            pixels.push((x, y));
            for (nx, ny) in neighbors(x, y, w, h, connectivity.offsets()) {
                let i = ny as usize * w as usize + nx as usize;
                if mask.bits()[i] && !seen[i] {
                    seen[i] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        out.push(Component { id: out.len(), pixels });
    }
    out
}

/// The component with the most pixels; the lowest id wins ties.
pub fn largest_component(components: &[Component]) -> Option<&Component> {
    components.iter().fold(None, |best: Option<&Component>, c| match best {
        Some(b) if b.size() >= c.size() => Some(b),
        _ => Some(c),
    })
}

/// Unset pixels with at least one set 4-neighbour, in row-major order.
pub fn mask_boundary(mask: &BinaryMask) -> Vec<(u32, u32)> {
    let (w, h) = mask.dimensions();
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) && neighbors(x, y, w, h, &N4).any(|(nx, ny)| mask.get(nx, ny)) {
                out.push((x, y));
            }
        }
    }
    out
}
