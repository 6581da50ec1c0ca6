//! Per-frame segmentation metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{dilate, erode, BinaryMask};

fn same_dims(context: &'static str, a: &BinaryMask, b: &BinaryMask) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::mismatch(context, a.dims(), b.dims()));
    }
    Ok(())
}

/// Intersection over union; two empty masks score 1.
pub fn iou(prediction: &BinaryMask, ground_truth: &BinaryMask) -> Result<f64> {
    same_dims("iou", prediction, ground_truth)?;
    let inter = prediction.intersection_count(ground_truth);
    let union = prediction.count() + ground_truth.count() - inter;
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionScore {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Pixelwise precision, recall and F-measure.
///
/// Empty denominators give 0, except that two empty masks give `(1, 1, 1)`.
pub fn region_fscore(prediction: &BinaryMask, ground_truth: &BinaryMask) -> Result<RegionScore> {
    same_dims("region_fscore", prediction, ground_truth)?;
    let (np, ng) = (prediction.count(), ground_truth.count());
    if np == 0 && ng == 0 {
        return Ok(RegionScore {
            precision: 1.0,
            recall: 1.0,
            f: 1.0,
        });
    }
    let tp = prediction.intersection_count(ground_truth);
    let precision = ratio(tp, np);
    let recall = ratio(tp, ng);
    Ok(RegionScore {
        precision,
        recall,
        f: harmonic(precision, recall),
    })
}

/// Contour pixels: the mask minus its radius-1 erosion.
pub fn boundary_map(mask: &BinaryMask) -> BinaryMask {
    mask.xor(&erode(mask, 1))
}

/// Tolerance used when none is configured: `ceil(0.008 · diagonal)` pixels.
pub fn default_boundary_tolerance(width: usize, height: usize) -> u32 {
    (0.008 * (width as f64).hypot(height as f64)).ceil() as u32
}

/// Contour F-measure; boundary pixels match when within `tolerance` pixels.
pub fn boundary_fscore(
    prediction: &BinaryMask,
    ground_truth: &BinaryMask,
    tolerance: u32,
) -> Result<f64> {
    same_dims("boundary_fscore", prediction, ground_truth)?;
    let bp = boundary_map(prediction);
    let bg = boundary_map(ground_truth);
    let (np, ng) = (bp.count(), bg.count());
    if np == 0 && ng == 0 {
        return Ok(1.0);
    }
    if np == 0 || ng == 0 {
        return Ok(0.0);
    }
    let precision = ratio(bp.intersection_count(&dilate(&bg, tolerance)), np);
    let recall = ratio(bg.intersection_count(&dilate(&bp, tolerance)), ng);
    Ok(harmonic(precision, recall))
}
