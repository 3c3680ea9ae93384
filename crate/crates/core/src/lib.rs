//! Glare removal and cervix region-of-interest extraction for colposcopy
//! images.
//!
//! Processing runs in two phases. Specular highlights are found as pixels
//! that are white in all three color planes, grown by a disk, and filled by
//! harmonic interpolation from the surrounding tissue ([`specular`],
//! [`inpaint`]). The glare-free image is then clustered by k-means on its
//! CIELAB chromaticity, the cluster nearest the image centre on the red side
//! is taken as the cervix, and its largest connected piece becomes the ROI
//! ([`roi`]). [`pipeline`] ties the stages together and adds batch I/O,
//! synthetic test images and detection-rate evaluation.

pub mod error;
pub mod imagecore;
pub mod inpaint;
pub mod pipeline;
pub mod roi;
pub mod specular;

pub use error::{Error, Result, Stage};
pub use imagecore::{BinaryMask, BoundingBox, GrayPlane, ImageRgb8, LabImage};
pub use pipeline::{process_image, PipelineConfig};
