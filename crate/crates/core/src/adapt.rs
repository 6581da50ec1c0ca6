//! Training-example selection for online adaptation.
//!
//! Confident foreground pixels become positives; pixels far from the last
//! predicted mask become negatives; everything else is ignored. A pixel that
//! qualifies for both is a positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{squared_distance_transform, BinaryMask, ScalarMap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptConfig {
    /// Confidence at or above which a pixel is a positive.
    pub positive_threshold: f64,
    /// Distance (pixels) from the last mask beyond which a pixel is a negative.
    pub negative_distance: f64,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            positive_threshold: 0.97,
            negative_distance: 200.0,
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.positive_threshold > 0.0 && self.positive_threshold < 1.0) {
            return Err(Error::InvalidConfig(
                "adapt: positive_threshold must lie in (0, 1)".into(),
            ));
        }
        if !(self.negative_distance >= 0.0 && self.negative_distance.is_finite()) {
            return Err(Error::InvalidConfig(
                "adapt: negative_distance must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Pairwise disjoint masks covering the frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptationExamples {
    pub positives: BinaryMask,
    pub negatives: BinaryMask,
    pub dontcare: BinaryMask,
}

/// Pixels farther than `distance` from every pixel of `mask`; all pixels
/// when the mask is empty.
pub fn far_from(mask: &BinaryMask, distance: f64) -> BinaryMask {
    let (w, h) = mask.dims();
    match squared_distance_transform(mask) {
        None => BinaryMask::full(w, h),
        // exact: sqrt(d²) > r  ⇔  d² > r² for integer d² and r ≥ 0
        Some(sq) => BinaryMask::from_vec(
            w,
            h,
            sq.into_iter()
                .map(|d| (d as f64).sqrt() > distance)
                .collect(),
        )
        .expect("dimensions preserved"),
    }
}

pub fn select_adaptation_examples(
    confidence: &ScalarMap,
    last_mask: &BinaryMask,
    config: &AdaptConfig,
) -> Result<AdaptationExamples> {
    config.validate()?;
    if confidence.dims() != last_mask.dims() {
        return Err(Error::mismatch(
            "select_adaptation_examples",
            confidence.dims(),
            last_mask.dims(),
        ));
    }
    if let Some(bad) = confidence.data().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidRaster(format!(
            "confidence {bad} outside [0, 1]"
        )));
    }
    let (w, h) = confidence.dims();
    let positives = BinaryMask::from_vec(
        w,
        h,
        confidence
            .data()
            .iter()
            .map(|&c| c >= config.positive_threshold)
            .collect(),
    )
    .expect("dimensions preserved");
    let negatives = far_from(last_mask, config.negative_distance).difference(&positives);
    let dontcare = positives.union(&negatives).complement();
    Ok(AdaptationExamples {
        positives,
        negatives,
        dontcare,
    })
}
