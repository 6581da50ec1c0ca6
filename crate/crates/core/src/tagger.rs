//! Motion-cue foreground tagging.
//!
//! The flow between the first two frames is thresholded into a motion mask.
//! Instance proposals that lie mostly inside that mask are kept and merged
//! into a single class-agnostic foreground mask, the pseudo ground truth.
//! When no proposal qualifies, the thresholded motion mask itself is used.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{compute_flow, flow_magnitude, FlowParams};
use crate::imaging::{largest_component, load_mask, BinaryMask, Image, ScalarMap};

/// File name of the proposal manifest inside a proposals directory.
pub const PROPOSALS_MANIFEST: &str = "proposals.json";

/// A detector's instance mask; ingested, never computed here.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceProposal {
    pub id: String,
    /// Carried for provenance only; selection ignores it.
    pub category: String,
    pub score: f64,
    pub mask: BinaryMask,
}

impl InstanceProposal {
    pub fn new(
        id: impl Into<String>,
        category: impl Into<String>,
        score: f64,
        mask: BinaryMask,
    ) -> Result<Self> {
        let id = id.into();
        if mask.is_empty() {
            return Err(Error::EmptyProposal { id });
        }
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::InvalidConfig(format!(
                "proposal {id:?}: score {score} outside [0, 1]"
            )));
        }
        Ok(InstanceProposal {
            id,
            category: category.into(),
            score,
            mask,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TagConfig {
    /// Motion threshold; a fraction of the maximum magnitude when `normalize` is set.
    pub flow_threshold: f64,
    /// Divide magnitudes by their per-frame maximum before thresholding.
    pub normalize: bool,
    /// A proposal is selected when strictly more than this fraction of it moves.
    pub overlap_threshold: f64,
    /// Smallest motion mask treated as real motion; `None` means 0.1% of the frame.
    pub min_flow_pixels: Option<usize>,
    /// Reduce the flow fallback mask to its largest 8-connected component.
    pub largest_component_only: bool,
}

impl Default for TagConfig {
    fn default() -> Self {
        TagConfig {
            flow_threshold: 0.25,
            normalize: true,
            overlap_threshold: 0.8,
            min_flow_pixels: None,
            largest_component_only: true,
        }
    }
}

impl TagConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.flow_threshold > 0.0 && self.flow_threshold.is_finite()) {
            return Err(Error::InvalidConfig(
                "tag: flow_threshold must be positive".into(),
            ));
        }
        if self.normalize && self.flow_threshold >= 1.0 {
            return Err(Error::InvalidConfig(
                "tag: normalized flow_threshold must lie in (0, 1)".into(),
            ));
        }
        if !(self.overlap_threshold > 0.0 && self.overlap_threshold <= 1.0) {
            return Err(Error::InvalidConfig(
                "tag: overlap_threshold must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// `min_flow_pixels` resolved for a frame of `area` pixels.
    pub fn resolved_min_flow_pixels(&self, area: usize) -> usize {
        self.min_flow_pixels.unwrap_or_else(|| area.div_ceil(1000))
    }
}

/// Which path produced the pseudo ground truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Proposals,
    FlowFallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagStatus {
    Ok,
    /// The motion mask was smaller than `min_flow_pixels`.
    DegenerateMotion,
}

/// Overlap of one proposal with the motion mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposalOverlap {
    pub id: String,
    pub category: String,
    pub score: f64,
    pub overlap: f64,
    pub selected: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PseudoGroundTruth {
    pub mask: BinaryMask,
    pub source: Source,
    pub status: TagStatus,
    pub selected_ids: Vec<String>,
    /// The thresholded motion mask used for selection.
    pub flow_mask: BinaryMask,
    pub overlaps: Vec<ProposalOverlap>,
    /// Largest flow magnitude in the frame, pixels.
    pub max_magnitude: f64,
    pub min_flow_pixels: usize,
}

/// Marks pixels whose (optionally max-normalized) magnitude exceeds the threshold.
pub fn threshold_flow(magnitude: &ScalarMap, config: &TagConfig) -> BinaryMask {
    let (w, h) = magnitude.dims();
    let max = magnitude.max();
    if max <= 0.0 {
        return BinaryMask::empty(w, h);
    }
    // v / max > t, compared as v > t·max
    let cut = if config.normalize {
        config.flow_threshold * max
    } else {
        config.flow_threshold
    };
    BinaryMask::from_vec(w, h, magnitude.data().iter().map(|&v| v > cut).collect())
        .expect("dimensions preserved")
}

/// `|proposal ∩ flow_mask| / |proposal|`.
pub fn proposal_overlap(proposal: &BinaryMask, flow_mask: &BinaryMask) -> Result<f64> {
    if proposal.dims() != flow_mask.dims() {
        return Err(Error::mismatch(
            "proposal_overlap",
            proposal.dims(),
            flow_mask.dims(),
        ));
    }
    let area = proposal.count();
    if area == 0 {
        return Err(Error::EmptyProposal { id: String::new() });
    }
    Ok(proposal.intersection_count(flow_mask) as f64 / area as f64)
}

fn overlaps(
    proposals: &[InstanceProposal],
    flow_mask: &BinaryMask,
    config: &TagConfig,
) -> Result<Vec<ProposalOverlap>> {
    proposals
        .iter()
        .map(|p| {
            let overlap = proposal_overlap(&p.mask, flow_mask).map_err(|e| match e {
                Error::EmptyProposal { .. } => Error::EmptyProposal { id: p.id.clone() },
                other => other,
            })?;
            Ok(ProposalOverlap {
                id: p.id.clone(),
                category: p.category.clone(),
                score: p.score,
                overlap,
                selected: overlap > config.overlap_threshold,
            })
        })
        .collect()
}

/// Proposals with overlap strictly above `overlap_threshold`, in input order.
pub fn select_proposals<'a>(
    proposals: &'a [InstanceProposal],
    flow_mask: &BinaryMask,
    config: &TagConfig,
) -> Result<Vec<&'a InstanceProposal>> {
    let scored = overlaps(proposals, flow_mask, config)?;
    Ok(proposals
        .iter()
        .zip(scored)
        .filter(|(_, o)| o.selected)
        .map(|(p, _)| p)
        .collect())
}

/// Pixelwise union of the selected masks; categories are dropped.
///
/// Returns `None` for an empty selection since there is no size to use.
pub fn merge_to_foreground<'a>(
    selected: impl IntoIterator<Item = &'a InstanceProposal>,
) -> Option<BinaryMask> {
    selected
        .into_iter()
        .map(|p| &p.mask)
        .fold(None, |acc: Option<BinaryMask>, m| {
            Some(match acc {
                Some(a) => a.union(m),
                None => m.clone(),
            })
        })
}

/// Tags the pseudo ground truth of `first` from the pair and the proposals.
pub fn make_pseudo_gt(
    first: &Image,
    second: &Image,
    proposals: &[InstanceProposal],
    flow_params: &FlowParams,
    config: &TagConfig,
) -> Result<PseudoGroundTruth> {
    config.validate()?;
    if first.dims() != second.dims() {
        return Err(Error::mismatch(
            "make_pseudo_gt",
            first.dims(),
            second.dims(),
        ));
    }
    for p in proposals {
        if p.mask.dims() != first.dims() {
            return Err(Error::mismatch(
                "make_pseudo_gt proposal",
                p.mask.dims(),
                first.dims(),
            ));
        }
    }
    let flow = compute_flow(first, second, flow_params)?;
    let magnitude = flow_magnitude(&flow);
    tag_from_magnitude(&magnitude, proposals, config)
}

/// The tagging stage on a precomputed magnitude map (e.g. from an external `.flo`).
pub fn tag_from_magnitude(
    magnitude: &ScalarMap,
    proposals: &[InstanceProposal],
    config: &TagConfig,
) -> Result<PseudoGroundTruth> {
    config.validate()?;
    let (w, h) = magnitude.dims();
    let flow_mask = threshold_flow(magnitude, config);
    let min_flow_pixels = config.resolved_min_flow_pixels(w * h);
    let scored = overlaps(proposals, &flow_mask, config)?;

    let base = |mask, source, status, selected_ids, overlaps| PseudoGroundTruth {
        mask,
        source,
        status,
        selected_ids,
        flow_mask: flow_mask.clone(),
        overlaps,
        max_magnitude: magnitude.max(),
        min_flow_pixels,
    };

    if flow_mask.count() < min_flow_pixels || flow_mask.is_empty() {
        log::warn!(
            "degenerate motion: {} moving pixels, need {min_flow_pixels}",
            flow_mask.count()
        );
        let scored = scored
            .into_iter()
            .map(|o| ProposalOverlap {
                selected: false,
                ..o
            })
            .collect();
        return Ok(base(
            BinaryMask::empty(w, h),
            Source::FlowFallback,
            TagStatus::DegenerateMotion,
            vec![],
            scored,
        ));
    }

    let selected: Vec<&InstanceProposal> = proposals
        .iter()
        .zip(&scored)
        .filter(|(_, o)| o.selected)
        .map(|(p, _)| p)
        .collect();
    if let Some(mask) = merge_to_foreground(selected.iter().copied()) {
        let ids = selected.iter().map(|p| p.id.clone()).collect();
        return Ok(base(mask, Source::Proposals, TagStatus::Ok, ids, scored));
    }

    let mask = if config.largest_component_only {
        largest_component(&flow_mask)
    } else {
        flow_mask.clone()
    };
    Ok(base(
        mask,
        Source::FlowFallback,
        TagStatus::Ok,
        vec![],
        scored,
    ))
}

/// One record of `proposals.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProposalRecord {
    pub id: String,
    pub category: String,
    pub score: f64,
    /// Mask raster path, relative to the manifest's directory.
    pub mask: PathBuf,
}

/// Reads `dir/proposals.json` and the masks it references.
pub fn load_proposals(dir: impl AsRef<Path>) -> Result<Vec<InstanceProposal>> {
    let dir = dir.as_ref();
    let manifest = dir.join(PROPOSALS_MANIFEST);
    let text = fs::read_to_string(&manifest).map_err(|e| Error::io(&manifest, e))?;
    let records: Vec<ProposalRecord> =
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: manifest.clone(),
            source,
        })?;
    records
        .into_iter()
        .map(|r| {
            let mask = load_mask(dir.join(&r.mask))?;
            InstanceProposal::new(r.id, r.category, r.score, mask)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proposal(id: &str, mask: BinaryMask) -> InstanceProposal {
        InstanceProposal::new(id, "thing", 0.9, mask).unwrap()
    }

    #[test]
    fn zero_magnitude_gives_empty_mask() {
        let m = ScalarMap::from_fn(4, 4, |_, _| 0.0);
        assert!(threshold_flow(&m, &TagConfig::default()).is_empty());
    }

    #[test]
    fn constant_positive_map_is_all_foreground() {
        let m = ScalarMap::from_fn(4, 4, |_, _| 0.3);
        assert_eq!(threshold_flow(&m, &TagConfig::default()).count(), 16);
    }

    #[test]
    fn normalized_threshold_keeps_only_fast_pixels() {
        let values = [0.0, 0.2, 1.0, 0.2, 1.0, 0.0];
        let m = ScalarMap::new(3, 2, values.to_vec()).unwrap();
        let mask = threshold_flow(&m, &TagConfig::default());
        assert_eq!(mask.data(), &[false, false, true, false, true, false]);
    }

    #[test]
    fn unnormalized_threshold_is_absolute() {
        let m = ScalarMap::new(3, 1, vec![0.5, 1.5, 3.0]).unwrap();
        let cfg = TagConfig {
            normalize: false,
            flow_threshold: 1.0,
            ..Default::default()
        };
        assert_eq!(threshold_flow(&m, &cfg).data(), &[false, true, true]);
    }

    #[test]
    fn overlap_fractions() {
        let flow = BinaryMask::rect(10, 10, 0, 0, 5, 10);
        assert_eq!(
            proposal_overlap(&BinaryMask::rect(10, 10, 1, 1, 2, 2), &flow).unwrap(),
            1.0
        );
        assert_eq!(
            proposal_overlap(&BinaryMask::rect(10, 10, 6, 0, 2, 2), &flow).unwrap(),
            0.0
        );
        // 10 px proposal, 7 of them inside the moving region
        let seven = BinaryMask::rect(10, 10, 0, 0, 7, 10);
        let p = BinaryMask::rect(10, 10, 0, 0, 10, 1);
        assert!((proposal_overlap(&p, &seven).unwrap() - 0.7).abs() < 1e-12);
        assert!(proposal_overlap(&BinaryMask::empty(10, 10), &flow).is_err());
        assert!(proposal_overlap(&BinaryMask::full(5, 5), &flow).is_err());
    }

    #[test]
    fn selection_is_strict_and_ordered() {
        let flow = BinaryMask::rect(10, 10, 0, 0, 10, 4);
        // 10 px, 8 inside -> exactly 0.8
        let edge =
            BinaryMask::rect(10, 10, 0, 2, 4, 2).union(&BinaryMask::rect(10, 10, 0, 4, 2, 1));
        let proposals = vec![
            proposal("full", BinaryMask::rect(10, 10, 0, 0, 3, 3)),
            proposal("half", BinaryMask::rect(10, 10, 5, 2, 2, 4)),
            proposal("edge", edge),
        ];
        let cfg = TagConfig::default();
        let overlaps: Vec<f64> = proposals
            .iter()
            .map(|p| proposal_overlap(&p.mask, &flow).unwrap())
            .collect();
        assert_eq!(overlaps, vec![1.0, 0.5, 0.8]);
        let ids: Vec<_> = select_proposals(&proposals, &flow, &cfg)
            .unwrap()
            .iter()
            .map(|p| p.id.as_str())
            .collect();
        assert_eq!(ids, vec!["full"]);
        assert!(select_proposals(&[], &flow, &cfg).unwrap().is_empty());
    }

    #[test]
    fn merging_is_a_union() {
        let a = proposal("a", BinaryMask::rect(10, 10, 0, 0, 5, 1));
        let b = proposal("b", BinaryMask::rect(10, 10, 0, 5, 4, 2));
        assert_eq!(merge_to_foreground([&a]).unwrap(), a.mask);
        assert_eq!(merge_to_foreground([&a, &b]).unwrap().count(), 13);
        assert_eq!(merge_to_foreground([&a, &a]).unwrap(), a.mask);
        assert!(merge_to_foreground(std::iter::empty()).is_none());
    }

    #[test]
    fn default_min_flow_pixels_is_a_tenth_of_a_percent() {
        let cfg = TagConfig::default();
        assert_eq!(cfg.resolved_min_flow_pixels(64 * 64), 5);
        assert_eq!(cfg.resolved_min_flow_pixels(1000), 1);
        let fixed = TagConfig {
            min_flow_pixels: Some(0),
            ..cfg
        };
        assert_eq!(fixed.resolved_min_flow_pixels(1000), 0);
    }

    #[test]
    fn static_magnitude_is_degenerate() {
        let m = ScalarMap::from_fn(8, 8, |_, _| 0.0);
        let p = vec![proposal("a", BinaryMask::rect(8, 8, 0, 0, 2, 2))];
        let pgt = tag_from_magnitude(&m, &p, &TagConfig::default()).unwrap();
        assert_eq!(pgt.source, Source::FlowFallback);
        assert_eq!(pgt.status, TagStatus::DegenerateMotion);
        assert!(pgt.mask.is_empty());
    }

    #[test]
    fn fallback_keeps_largest_component() {
        let m = ScalarMap::from_fn(20, 20, |x, y| {
            if (2..8).contains(&x) && (2..8).contains(&y) || (x == 15 && y == 15) {
                1.0
            } else {
                0.0
            }
        });
        let pgt = tag_from_magnitude(&m, &[], &TagConfig::default()).unwrap();
        assert_eq!(pgt.source, Source::FlowFallback);
        assert_eq!(pgt.mask, BinaryMask::rect(20, 20, 2, 2, 6, 6));
        assert_eq!(pgt.flow_mask.count(), 37);
    }

    #[test]
    fn invalid_proposals_are_rejected() {
        assert!(InstanceProposal::new("x", "c", 0.5, BinaryMask::empty(2, 2)).is_err());
        assert!(InstanceProposal::new("x", "c", 1.5, BinaryMask::full(2, 2)).is_err());
    }
}
