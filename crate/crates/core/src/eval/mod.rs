//! Segmentation metrics, dataset evaluation and the erosion/dilation study.

mod analysis;
mod metrics;
mod report;

pub use analysis::{erosion_dilation_analysis, render_analysis_table, AnalysisRow, Perturbation};
pub use metrics::{
    boundary_fscore, boundary_map, default_boundary_tolerance, iou, region_fscore, RegionScore,
};
pub use report::{
    evaluate_dataset, render_table, DatasetManifest, DatasetScore, EvalReport, FrameScore,
    ReportConfig, SequenceEntry, SequenceScore,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::BinaryMask;

/// A prediction and its ground truth for one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FramePair {
    pub frame_index: usize,
    pub prediction: BinaryMask,
    pub ground_truth: BinaryMask,
}

impl FramePair {
    pub fn new(
        frame_index: usize,
        prediction: BinaryMask,
        ground_truth: BinaryMask,
    ) -> Result<Self> {
        if prediction.dims() != ground_truth.dims() {
            return Err(Error::mismatch(
                "frame pair",
                prediction.dims(),
                ground_truth.dims(),
            ));
        }
        Ok(FramePair {
            frame_index,
            prediction,
            ground_truth,
        })
    }
}

/// Which frames of a sequence count towards its mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FramePolicy {
    /// Drop frame 0, whose pseudo ground truth seeds the method.
    pub skip_first: bool,
    pub skip_last: bool,
}

impl Default for FramePolicy {
    fn default() -> Self {
        FramePolicy {
            skip_first: true,
            skip_last: false,
        }
    }
}

impl FramePolicy {
    pub const ALL_FRAMES: FramePolicy = FramePolicy {
        skip_first: false,
        skip_last: false,
    };

    /// Whether frame `index` of a sequence with `len` frames is admitted.
    pub fn admits(&self, index: usize, len: usize) -> bool {
        !(self.skip_first && index == 0 || self.skip_last && index + 1 == len)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub policy: FramePolicy,
    /// Boundary match tolerance in pixels; `None` uses [`default_boundary_tolerance`].
    pub boundary_tolerance: Option<u32>,
}

/// Mean IoU over the admitted frames.
///
/// Frame positions for the policy come from `frame_index`; the sequence
/// length is one past the largest index.
pub fn sequence_miou(frames: &[FramePair], policy: &FramePolicy) -> Result<f64> {
    let len = frames.iter().map(|f| f.frame_index + 1).max().unwrap_or(0);
    let scores = frames
        .iter()
        .filter(|f| policy.admits(f.frame_index, len))
        .map(|f| iou(&f.prediction, &f.ground_truth))
        .collect::<Result<Vec<_>>>()?;
    mean(&scores).ok_or_else(|| Error::EmptyAdmissibleSet {
        sequence: String::new(),
    })
}

/// Left-to-right arithmetic mean.
pub(crate) fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sum = 0.0;
    for v in values {
        sum += v;
    }
    Some(sum / values.len() as f64)
}
