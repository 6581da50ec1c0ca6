//! Gaussian image pyramids and the resampling helpers the solver uses
//! between levels.

use crate::flow::FlowParams;
use crate::imaging::{sample_bilinear, FlowField, Image};

/// Image pyramid, coarsest level first; the last level is the input image.
#[derive(Clone, Debug)]
pub struct Pyramid {
    pub levels: Vec<Image>,
}

impl Pyramid {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn finest(&self) -> &Image {
        self.levels.last().expect("pyramid has at least one level")
    }

    pub fn coarsest(&self) -> &Image {
        &self.levels[0]
    }
}

/// Level sizes, finest first, for a `width × height` input.
///
/// Level `k` is the input scaled by `ratio^k` (rounded); generation stops
/// before the smaller side would drop under `min_width`.
pub fn level_dims(width: usize, height: usize, params: &FlowParams) -> Vec<(usize, usize)> {
    let mut dims = vec![(width, height)];
    for k in 1.. {
        let scale = params.pyramid_ratio.powi(k);
        let w = (width as f64 * scale).round() as usize;
        let h = (height as f64 * scale).round() as usize;
        if w.min(h) < params.min_width || (w, h) == *dims.last().unwrap() {
            break;
        }
        dims.push((w, h));
    }
    dims
}

fn gaussian_kernel(sigma: f64) -> Vec<f32> {
    let radius = (3.0 * sigma).ceil().max(1.0) as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k.into_iter().map(|v| v as f32).collect()
}

/// Separable Gaussian blur of a single-channel image, clamped borders.
pub fn gaussian_blur(image: &Image, sigma: f64) -> Image {
    if sigma <= 0.0 {
        return image.clone();
    }
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as i64;
    let (w, h) = image.dims();
    let src = image.data();
    let mut tmp = vec![0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, k) in kernel.iter().enumerate() {
                let sx = (x as i64 + j as i64 - r).clamp(0, w as i64 - 1) as usize;
                acc += k * src[y * w + sx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, k) in kernel.iter().enumerate() {
                let sy = (y as i64 + j as i64 - r).clamp(0, h as i64 - 1) as usize;
                acc += k * tmp[sy * w + x];
            }
            out[y * w + x] = acc.clamp(0.0, 1.0);
        }
    }
    Image::from_raw_unchecked(w, h, 1, out)
}

/// Bilinear resize of a single-channel image, pixel-center aligned.
pub fn resize(image: &Image, width: usize, height: usize) -> Image {
    let sx = image.width() as f32 / width as f32;
    let sy = image.height() as f32 / height as f32;
    let mut data = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let px = (x as f32 + 0.5) * sx - 0.5;
            let py = (y as f32 + 0.5) * sy - 0.5;
            data.push(sample_bilinear(image, 0, px, py).clamp(0.0, 1.0));
        }
    }
    Image::from_raw_unchecked(width, height, 1, data)
}

/// Builds the pyramid of a grayscale image (RGB input is converted first).
///
/// Each coarser level is the previous one blurred with the anti-aliasing
/// sigma `0.5·sqrt(1/s² − 1)` for the actual scale step `s`, then resampled.
pub fn build_pyramid(image: &Image, params: &FlowParams) -> Pyramid {
    let gray = image.to_gray();
    let dims = level_dims(gray.width(), gray.height(), params);
    let mut levels = vec![gray];
    for &(w, h) in &dims[1..] {
        let prev = levels.last().unwrap();
        let step = w as f64 / prev.width() as f64;
        let sigma = 0.5 * (1.0 / (step * step) - 1.0).max(0.0).sqrt();
        let next = resize(&gaussian_blur(prev, sigma), w, h);
        levels.push(next);
    }
    levels.reverse();
    Pyramid { levels }
}

/// Resamples a flow field to `width × height` and rescales its vectors by
/// the size ratio of each axis.
pub fn upsample_flow(flow: &FlowField, width: usize, height: usize) -> FlowField {
    let (cw, ch) = flow.dims();
    let sx = cw as f32 / width as f32;
    let sy = ch as f32 / height as f32;
    let (u, v) = split(flow);
    FlowField::from_fn(width, height, |x, y| {
        let px = (x as f32 + 0.5) * sx - 0.5;
        let py = (y as f32 + 0.5) * sy - 0.5;
        (
            sample_bilinear(&u, 0, px, py) / sx,
            sample_bilinear(&v, 0, px, py) / sy,
        )
    })
}

/// Component planes as unclamped single-channel rasters for sampling.
fn split(flow: &FlowField) -> (Image, Image) {
    let (w, h) = flow.dims();
    let u = flow.data().iter().step_by(2).copied().collect();
    let v = flow.data().iter().skip(1).step_by(2).copied().collect();
    (
        Image::from_raw_unchecked(w, h, 1, u),
        Image::from_raw_unchecked(w, h, 1, v),
    )
}
