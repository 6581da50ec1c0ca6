//! Bilinear sampling and flow-driven warping with border clamping.

use crate::error::{Error, Result};
use crate::imaging::{FlowField, Image};

/// Bilinear sample of channel `c` at `(x, y)`; coordinates clamp to the raster.
#[inline]
pub fn sample_bilinear(image: &Image, c: usize, x: f32, y: f32) -> f32 {
    let (w, h) = image.dims();
    let x = x.clamp(0.0, (w - 1) as f32);
    let y = y.clamp(0.0, (h - 1) as f32);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - x0 as f32;
    let fy = y - y0 as f32;
    let top = (1.0 - fx) * image.get(x0, y0, c) + fx * image.get(x1, y0, c);
    let bottom = (1.0 - fx) * image.get(x0, y1, c) + fx * image.get(x1, y1, c);
    (1.0 - fy) * top + fy * bottom
}

/// `out(x) = image(x + flow(x))`, sampled bilinearly with clamped borders.
pub fn bilinear_warp(image: &Image, flow: &FlowField) -> Result<Image> {
    if image.dims() != flow.dims() {
        return Err(Error::mismatch("bilinear_warp", image.dims(), flow.dims()));
    }
    let (w, h) = image.dims();
    let ch = image.channels();
    let mut data = Vec::with_capacity(w * h * ch);
    for y in 0..h {
        for x in 0..w {
            let (u, v) = flow.get(x, y);
            let sx = x as f32 + u;
            let sy = y as f32 + v;
            for c in 0..ch {
                data.push(sample_bilinear(image, c, sx, sy).clamp(0.0, 1.0));
            }
        }
    }
    Ok(Image::from_raw_unchecked(w, h, ch, data))
}
