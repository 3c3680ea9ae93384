//! Raster types, color conversion, morphology, components and cropping.

mod color;
mod components;
mod crop;
pub mod io;
mod morphology;
mod raster;

pub use color::{rgb_to_lab, split_planes, srgb8_to_lab, srgb_to_lab, srgb_to_linear, unit, WHITE_D65};
pub(crate) use components::neighbors;
pub use components::{connected_components, largest_component, mask_boundary, Component, Connectivity};
pub use crop::{crop, crop_mask};
pub use morphology::{dilate, StructuringElement};
pub use raster::{BinaryMask, BoundingBox, GrayPlane, ImageRgb8, Lab, LabImage};
