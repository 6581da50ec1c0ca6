//! Sensitivity of IoU to a shrunken or grown pseudo ground truth.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::iou;
use crate::error::{Error, Result};
use crate::imaging::{dilate, erode, BinaryMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    Baseline,
    Erode,
    Dilate,
}

impl Perturbation {
    pub fn label(self) -> &'static str {
        match self {
            Perturbation::Baseline => "baseline",
            Perturbation::Erode => "erode",
            Perturbation::Dilate => "dilate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub radius: u32,
    pub variant: Perturbation,
    pub iou: f64,
}

/// A radius-0 baseline row followed by an erode and a dilate row per radius.
pub fn erosion_dilation_analysis(
    pseudo_gt: &BinaryMask,
    ground_truth: &BinaryMask,
    radii: &[u32],
) -> Result<Vec<AnalysisRow>> {
    if pseudo_gt.dims() != ground_truth.dims() {
        return Err(Error::mismatch(
            "erosion_dilation_analysis",
            pseudo_gt.dims(),
            ground_truth.dims(),
        ));
    }
    if radii.contains(&0) {
        return Err(Error::InvalidConfig(
            "analysis radii must be at least 1".into(),
        ));
    }
    let mut rows = vec![AnalysisRow {
        radius: 0,
        variant: Perturbation::Baseline,
        iou: iou(pseudo_gt, ground_truth)?,
    }];
    for &r in radii {
        rows.push(AnalysisRow {
            radius: r,
            variant: Perturbation::Erode,
            iou: iou(&erode(pseudo_gt, r), ground_truth)?,
        });
        rows.push(AnalysisRow {
            radius: r,
            variant: Perturbation::Dilate,
            iou: iou(&dilate(pseudo_gt, r), ground_truth)?,
        });
    }
    Ok(rows)
}

/// Plain-text table; IoU shown as a percentage with one decimal.
pub fn render_analysis_table(rows: &[AnalysisRow]) -> String {
    let mut out = format!("{:<10} {:>6} {:>7}\n", "variant", "radius", "mIoU");
    for row in rows {
        let _ = writeln!(
            out,
            "{:<10} {:>6} {:>7.1}",
            row.variant.label(),
            row.radius,
            row.iou * 100.0
        );
    }
    out
}
