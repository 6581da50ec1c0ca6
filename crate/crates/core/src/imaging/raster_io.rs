//! Mask, frame and confidence raster files.
//!
//! Masks are 8-bit single-channel rasters with `0` for background and `255`
//! for foreground. On load any value above 127 is foreground. Paletted PNGs
//! (DAVIS-style annotations) are read by palette index: index 0 is
//! background, any other index is foreground.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, GrayImage, ImageFormat, Luma};

use crate::error::{Error, Result};
use crate::imaging::flo::{decode_scalar_flo, has_flo_magic};
use crate::imaging::{BinaryMask, Image, ScalarMap};

const MASK_THRESHOLD: u8 = 127;

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn decode_dynamic(path: &Path, bytes: &[u8]) -> Result<DynamicImage> {
    image::load_from_memory(bytes).map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })
}

/// Palette indices of an indexed PNG, or `None` when the file is not indexed.
fn indexed_png(bytes: &[u8]) -> Option<(usize, usize, Vec<u8>)> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().ok()?;
    if reader.info().color_type != png::ColorType::Indexed {
        return None;
    }
    let bits = reader.info().bit_depth as usize;
    let mut buf = vec![0; reader.output_buffer_size()?];
    let frame = reader.next_frame(&mut buf).ok()?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let per_byte = 8 / bits;
    let mask = ((1u16 << bits) - 1) as u8;
    let mut indices = Vec::with_capacity(w * h);
    for row in buf.chunks(frame.line_size).take(h) {
        for x in 0..w {
            let byte = row[x / per_byte];
            let shift = 8 - bits * (x % per_byte + 1);
            indices.push((byte >> shift) & mask);
        }
    }
    Some((w, h, indices))
}

/// Decodes a mask raster from memory; `path` is only used in diagnostics.
pub fn decode_mask(bytes: &[u8], path: &Path) -> Result<BinaryMask> {
    if let Some((w, h, indices)) = indexed_png(bytes) {
        return BinaryMask::from_vec(w, h, indices.into_iter().map(|i| i != 0).collect());
    }
    let img = decode_dynamic(path, bytes)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = match img {
        DynamicImage::ImageLuma8(g) => g
            .into_raw()
            .into_iter()
            .map(|v| v > MASK_THRESHOLD)
            .collect(),
        DynamicImage::ImageLumaA8(g) => g.pixels().map(|p| p.0[0] > MASK_THRESHOLD).collect(),
        DynamicImage::ImageLuma16(g) => g
            .into_raw()
            .into_iter()
            .map(|v| (v >> 8) as u8 > MASK_THRESHOLD)
            .collect(),
        other => {
            let rgb = other.to_rgb8();
            let mut data = Vec::with_capacity(w * h);
            for p in rgb.pixels() {
                let [r, g, b] = p.0;
                if r != g || g != b {
                    return Err(Error::InvalidRaster(format!(
                        "{}: multi-channel mask with unequal channels",
                        path.display()
                    )));
                }
                data.push(r > MASK_THRESHOLD);
            }
            data
        }
    };
    BinaryMask::from_vec(w, h, data)
}

/// PNG bytes of a mask, `0`/`255` single channel.
pub fn encode_mask(mask: &BinaryMask) -> Vec<u8> {
    let raw = mask
        .data()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    let img = GrayImage::from_raw(mask.width() as u32, mask.height() as u32, raw)
        .expect("buffer sized from mask");
    encode_gray(&img)
}

fn encode_gray(img: &GrayImage) -> Vec<u8> {
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png)
        .expect("in-memory png encoding cannot fail");
    out.into_inner()
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    decode_mask(&read_bytes(path)?, path)
}

pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_mask(mask)).map_err(|e| Error::io(path, e))
}

/// Loads a frame as grayscale or RGB with intensities scaled into `[0, 1]`.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let img = decode_dynamic(path, &read_bytes(path)?)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let image = match img {
        DynamicImage::ImageLuma8(g) => Image::from_raw_unchecked(
            w,
            h,
            1,
            g.into_raw().into_iter().map(|v| v as f32 / 255.0).collect(),
        ),
        DynamicImage::ImageLuma16(g) => Image::from_raw_unchecked(
            w,
            h,
            1,
            g.into_raw()
                .into_iter()
                .map(|v| v as f32 / 65535.0)
                .collect(),
        ),
        DynamicImage::ImageLumaA8(_) | DynamicImage::ImageLumaA16(_) => {
            let g = img.to_luma16();
            Image::from_raw_unchecked(
                w,
                h,
                1,
                g.into_raw()
                    .into_iter()
                    .map(|v| v as f32 / 65535.0)
                    .collect(),
            )
        }
        DynamicImage::ImageRgb8(_) | DynamicImage::ImageRgba8(_) => Image::from_raw_unchecked(
            w,
            h,
            3,
            img.to_rgb8()
                .into_raw()
                .into_iter()
                .map(|v| v as f32 / 255.0)
                .collect(),
        ),
        other => Image::from_raw_unchecked(
            w,
            h,
            3,
            other
                .to_rgb16()
                .into_raw()
                .into_iter()
                .map(|v| v as f32 / 65535.0)
                .collect(),
        ),
    };
    Ok(image)
}

fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Writes an image as an 8-bit PNG (gray or RGB).
pub fn save_image(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (image.width() as u32, image.height() as u32);
    let raw: Vec<u8> = image.data().iter().map(|&v| quantize(v)).collect();
    let bytes = if image.channels() == 1 {
        encode_gray(&GrayImage::from_raw(w, h, raw).expect("sized buffer"))
    } else {
        let rgb = image::RgbImage::from_raw(w, h, raw).expect("sized buffer");
        let mut out = Cursor::new(Vec::new());
        rgb.write_to(&mut out, ImageFormat::Png)
            .expect("in-memory png encoding cannot fail");
        out.into_inner()
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes a scalar map as an 8-bit gray PNG, normalized by its maximum.
pub fn save_scalar_visualization(map: &ScalarMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let max = map.max();
    let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
    let mut img = GrayImage::new(map.width() as u32, map.height() as u32);
    for (i, v) in map.data().iter().enumerate() {
        let x = (i % map.width()) as u32;
        let y = (i / map.width()) as u32;
        img.put_pixel(x, y, Luma([quantize((v * scale) as f32)]));
    }
    fs::write(path, encode_gray(&img)).map_err(|e| Error::io(path, e))
}

/// Loads a confidence map: single-channel `.flo`-style floats, or an 8/16-bit
/// raster scaled into `[0, 1]`.
pub fn load_confidence(path: impl AsRef<Path>) -> Result<ScalarMap> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    if has_flo_magic(&bytes) {
        return decode_scalar_flo(&bytes);
    }
    let img = decode_dynamic(path, &bytes)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma8(g) => g.into_raw().into_iter().map(|v| v as f64 / 255.0).collect(),
        DynamicImage::ImageLuma16(g) => g
            .into_raw()
            .into_iter()
            .map(|v| v as f64 / 65535.0)
            .collect(),
        _ => {
            return Err(Error::InvalidRaster(format!(
                "{}: confidence maps must be single-channel",
                path.display()
            )))
        }
    };
    ScalarMap::new(w, h, data)
}
