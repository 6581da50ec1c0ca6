//! Rasters, file formats and mask geometry.

mod components;
mod distance;
pub mod flo;
mod morphology;
mod raster;
mod raster_io;
mod warp;

pub use components::{connected_components, largest_component, Component};
pub use distance::{distance_transform, squared_distance_transform, NO_FOREGROUND_DISTANCE};
pub use flo::{read_flo, read_scalar_flo, write_flo, write_scalar_flo};
pub use morphology::{dilate, disk_offsets, erode};
pub use raster::{BinaryMask, FlowField, Image, ScalarMap, LUMA_WEIGHTS};
pub use raster_io::{
    decode_mask, encode_mask, load_confidence, load_image, load_mask, save_image, save_mask,
    save_scalar_visualization,
};
pub use warp::{bilinear_warp, sample_bilinear};
