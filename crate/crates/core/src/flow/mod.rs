//! Coarse-to-fine variational optical flow.
//!
//! Both frames are reduced to grayscale and decomposed into Gaussian
//! pyramids. Starting from zero flow at the coarsest level, each level
//! upsamples the previous estimate, refines it with [`solve_level`]
//! (robust data term, robust joint smoothness, warping, IRLS + SOR) and
//! passes it on. The finest-level field is returned.

mod params;
mod pyramid;
mod solver;

pub use params::FlowParams;
pub use pyramid::{build_pyramid, gaussian_blur, level_dims, resize, upsample_flow, Pyramid};
pub use solver::{robust_energy, solve_level, solve_level_observed, LevelSnapshot};

use crate::error::{Error, Result};
use crate::imaging::{FlowField, Image, ScalarMap};

/// Smallest frame side accepted by [`compute_flow`].
pub const MIN_FRAME_SIDE: usize = 4;

fn is_constant(image: &Image) -> bool {
    let first = image.data()[0];
    image.data().iter().all(|&v| v == first)
}

/// Flow from `first` to `second`: `second(x + w(x)) ≈ first(x)`.
pub fn compute_flow(first: &Image, second: &Image, params: &FlowParams) -> Result<FlowField> {
    compute_flow_observed(first, second, params, &mut |_| {})
}

/// [`compute_flow`] that reports every accepted per-level estimate.
pub fn compute_flow_observed(
    first: &Image,
    second: &Image,
    params: &FlowParams,
    observer: &mut dyn FnMut(&LevelSnapshot<'_>),
) -> Result<FlowField> {
    params.validate()?;
    if first.dims() != second.dims() {
        return Err(Error::mismatch("compute_flow", first.dims(), second.dims()));
    }
    let (w, h) = first.dims();
    if w < MIN_FRAME_SIDE || h < MIN_FRAME_SIDE {
        return Err(Error::InvalidDimensions {
            width: w as i64,
            height: h as i64,
        });
    }
    let first = first.to_gray();
    let second = second.to_gray();
    if is_constant(&first) && is_constant(&second) {
        return Ok(FlowField::zeros(w, h));
    }

    let p1 = build_pyramid(&first, params);
    let p2 = build_pyramid(&second, params);
    let mut flow = FlowField::zeros(p1.coarsest().width(), p1.coarsest().height());
    for (level, (fixed, moving)) in p1.levels.iter().zip(&p2.levels).enumerate() {
        if flow.dims() != fixed.dims() {
            flow = upsample_flow(&flow, fixed.width(), fixed.height());
        }
        let inc = solve_level_observed(fixed, moving, &flow, params, level, observer)?;
        let data = flow
            .data()
            .iter()
            .zip(inc.data())
            .map(|(a, b)| a + b)
            .collect();
        flow = FlowField::from_vec(fixed.width(), fixed.height(), data)
            .map_err(|_| Error::Internal("non-finite flow".into()))?;
    }
    Ok(flow)
}

/// Per-pixel Euclidean norm `sqrt(u² + v²)`.
pub fn flow_magnitude(flow: &FlowField) -> ScalarMap {
    let (w, h) = flow.dims();
    ScalarMap::from_fn(w, h, |x, y| {
        let (u, v) = flow.get(x, y);
        f64::from(u).hypot(f64::from(v))
    })
}
