use super::raster::{BinaryMask, BoundingBox, ImageRgb8};
use crate::error::{Error, Result};

fn check_box(bbox: &BoundingBox, width: u32, height: u32) -> Result<()> {
    if !bbox.fits(width, height) {
        return Err(Error::BoxOutOfBounds {
            x0: bbox.x0,
            y0: bbox.y0,
            x1: bbox.x1,
            y1: bbox.y1,
            width,
            height,
        });
    }
    Ok(())
}

pub fn crop(img: &ImageRgb8, bbox: &BoundingBox) -> Result<ImageRgb8> {
    check_box(bbox, img.width(), img.height())?;
    ImageRgb8::from_fn(bbox.width(), bbox.height(), |x, y| img.get(bbox.x0 + x, bbox.y0 + y))
}

pub fn crop_mask(mask: &BinaryMask, bbox: &BoundingBox) -> Result<BinaryMask> {
    check_box(bbox, mask.width(), mask.height())?;
    BinaryMask::from_fn(bbox.width(), bbox.height(), |x, y| mask.get(bbox.x0 + x, bbox.y0 + y))
}
