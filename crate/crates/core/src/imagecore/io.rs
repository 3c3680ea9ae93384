//! PNG/JPEG decode and PNG encode. Masks are single-channel 0/255 PNGs.

use std::io::Cursor;
use std::path::Path;

use image::{GrayImage, ImageFormat, RgbImage};

use super::raster::{BinaryMask, ImageRgb8};
use crate::error::{Error, Result};

fn image_err(path: &Path) -> impl FnOnce(image::ImageError) -> Error + '_ {
    move |source| Error::Image {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_rgb(path: &Path) -> Result<ImageRgb8> {
    let decoded = image::open(path).map_err(image_err(path))?.into_rgb8();
    let (w, h) = decoded.dimensions();
    ImageRgb8::from_raw(w, h, decoded.as_raw())
}

pub fn load_mask(path: &Path) -> Result<BinaryMask> {
    let decoded = image::open(path).map_err(image_err(path))?.into_luma8();
    let (w, h) = decoded.dimensions();
    BinaryMask::new(w, h, decoded.as_raw().iter().map(|&v| v >= 128).collect())
}

fn to_rgb_image(img: &ImageRgb8) -> RgbImage {
    RgbImage::from_raw(img.width(), img.height(), img.to_raw()).expect("length checked at construction")
}

fn to_gray_image(mask: &BinaryMask) -> GrayImage {
    let data = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    GrayImage::from_raw(mask.width(), mask.height(), data).expect("length checked at construction")
}

pub fn encode_png(img: &ImageRgb8) -> Vec<u8> {
    let mut buf = Cursor::new(Vec::new());
    to_rgb_image(img)
        .write_to(&mut buf, ImageFormat::Png)
        .expect("in-memory PNG encoding");
    buf.into_inner()
}

pub fn encode_mask_png(mask: &BinaryMask) -> Vec<u8> {
    let mut buf = Cursor::new(Vec::new());
    to_gray_image(mask)
        .write_to(&mut buf, ImageFormat::Png)
        .expect("in-memory PNG encoding");
    buf.into_inner()
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_png(img: &ImageRgb8, path: &Path) -> Result<()> {
    write_bytes(path, &encode_png(img))
}

pub fn save_mask_png(mask: &BinaryMask, path: &Path) -> Result<()> {
    write_bytes(path, &encode_mask_png(mask))
}
