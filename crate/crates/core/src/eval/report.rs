//! Dataset manifests, evaluation reports and their table rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    boundary_fscore, default_boundary_tolerance, iou, mean, region_fscore, EvalConfig, FramePolicy,
};
use crate::error::{Error, Result};
use crate::imaging::load_mask;

/// One sequence of a dataset manifest. Paths are relative to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceEntry {
    pub name: String,
    #[serde(default)]
    pub frames: Vec<PathBuf>,
    /// `null` marks a frame without annotation; it is not scored.
    pub ground_truth: Vec<Option<PathBuf>>,
    pub predictions: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proposals: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub sequences: Vec<SequenceEntry>,
    /// Directory relative paths resolve against; set by [`DatasetManifest::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: DatasetManifest =
            serde_json::from_str(&text).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })?;
        manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(manifest)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        self.base_dir.join(path)
    }

    /// Checks alignment and that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        if self.sequences.is_empty() {
            return Err(Error::NoSequences);
        }
        for (k, seq) in self.sequences.iter().enumerate() {
            if self.sequences[..k].iter().any(|s| s.name == seq.name) {
                return Err(Error::Manifest(format!(
                    "duplicate sequence name {:?}",
                    seq.name
                )));
            }
            let n = seq.predictions.len();
            if seq.ground_truth.len() != n || !(seq.frames.is_empty() || seq.frames.len() == n) {
                return Err(Error::Manifest(format!(
                    "sequence {:?}: {} frames, {} ground truth and {} prediction entries",
                    seq.name,
                    seq.frames.len(),
                    seq.ground_truth.len(),
                    n
                )));
            }
            for i in 0..n {
                let referenced = seq
                    .frames
                    .get(i)
                    .into_iter()
                    .chain(seq.ground_truth[i].as_ref());
                for p in referenced.chain(Some(&seq.predictions[i])) {
                    let full = self.resolve(p);
                    if let Err(e) = fs::metadata(&full) {
                        return Err(Error::Frame {
                            sequence: seq.name.clone(),
                            frame: i,
                            source: Box::new(Error::io(full, e)),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    pub sequence: String,
    pub frame_index: usize,
    pub iou: f64,
    pub region_f: f64,
    pub boundary_f: f64,
    /// Whether the frame policy counts this frame.
    pub admitted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceScore {
    pub sequence: String,
    pub frames: usize,
    pub mean_iou: f64,
    pub region_f: f64,
    pub boundary_f: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetScore {
    pub sequences: usize,
    pub mean_iou: f64,
    pub region_f: f64,
    pub boundary_f: f64,
}

/// Evaluation settings and conventions, echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub policy: FramePolicy,
    /// `null` means `ceil(0.008 * diagonal)` per frame.
    pub boundary_tolerance: Option<u32>,
    pub both_empty: String,
    pub aggregation: String,
    pub boundary_map: String,
}

impl ReportConfig {
    fn new(config: &EvalConfig) -> Self {
        ReportConfig {
            policy: config.policy,
            boundary_tolerance: config.boundary_tolerance,
            both_empty: "score_one".into(),
            aggregation: "mean_of_sequence_means".into(),
            boundary_map: "mask_xor_erode_1".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_frame: Vec<FrameScore>,
    pub per_sequence: Vec<SequenceScore>,
    pub dataset: DatasetScore,
    pub config: ReportConfig,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

struct Job<'a> {
    sequence: &'a SequenceEntry,
    index: usize,
    ground_truth: &'a Path,
    admitted: bool,
}

fn score_frame(
    manifest: &DatasetManifest,
    job: &Job<'_>,
    config: &EvalConfig,
) -> Result<FrameScore> {
    let pred = load_mask(manifest.resolve(&job.sequence.predictions[job.index]))?;
    let gt = load_mask(manifest.resolve(job.ground_truth))?;
    let tolerance = config
        .boundary_tolerance
        .unwrap_or_else(|| default_boundary_tolerance(gt.width(), gt.height()));
    Ok(FrameScore {
        sequence: job.sequence.name.clone(),
        frame_index: job.index,
        iou: iou(&pred, &gt)?,
        region_f: region_fscore(&pred, &gt)?.f,
        boundary_f: boundary_fscore(&pred, &gt, tolerance)?,
        admitted: job.admitted,
    })
}

/// Scores every annotated frame and aggregates per sequence and dataset.
///
/// Frames are scored in parallel on the current rayon pool; aggregation
/// runs in manifest order, so the report does not depend on the pool size.
pub fn evaluate_dataset(manifest: &DatasetManifest, config: &EvalConfig) -> Result<EvalReport> {
    manifest.validate()?;
    let jobs: Vec<Job<'_>> = manifest
        .sequences
        .iter()
        .flat_map(|seq| {
            let n = seq.predictions.len();
            seq.ground_truth
                .iter()
                .enumerate()
                .filter_map(move |(i, gt)| {
                    gt.as_deref().map(|gt| Job {
                        sequence: seq,
                        index: i,
                        ground_truth: gt,
                        admitted: config.policy.admits(i, n),
                    })
                })
        })
        .collect();

    let scored: Vec<Result<FrameScore>> = jobs
        .par_iter()
        .map(|job| {
            score_frame(manifest, job, config).map_err(|e| Error::Frame {
                sequence: job.sequence.name.clone(),
                frame: job.index,
                source: Box::new(e),
            })
        })
        .collect();
    let per_frame = scored.into_iter().collect::<Result<Vec<_>>>()?;

    let mut per_sequence = Vec::with_capacity(manifest.sequences.len());
    for seq in &manifest.sequences {
        let admitted: Vec<&FrameScore> = per_frame
            .iter()
            .filter(|f| f.admitted && f.sequence == seq.name)
            .collect();
        let column = |get: fn(&FrameScore) -> f64| {
            mean(&admitted.iter().map(|f| get(f)).collect::<Vec<_>>())
        };
        let Some(mean_iou) = column(|f| f.iou) else {
            return Err(Error::EmptyAdmissibleSet {
                sequence: seq.name.clone(),
            });
        };
        per_sequence.push(SequenceScore {
            sequence: seq.name.clone(),
            frames: admitted.len(),
            mean_iou,
            region_f: column(|f| f.region_f).unwrap_or(0.0),
            boundary_f: column(|f| f.boundary_f).unwrap_or(0.0),
        });
    }

    let column = |get: fn(&SequenceScore) -> f64| {
        mean(&per_sequence.iter().map(get).collect::<Vec<_>>()).unwrap_or(0.0)
    };
    let dataset = DatasetScore {
        sequences: per_sequence.len(),
        mean_iou: column(|s| s.mean_iou),
        region_f: column(|s| s.region_f),
        boundary_f: column(|s| s.boundary_f),
    };
    Ok(EvalReport {
        per_frame,
        per_sequence,
        dataset,
        config: ReportConfig::new(config),
    })
}

/// Per-sequence table with a closing mean row; scores ×100, one decimal.
pub fn render_table(report: &EvalReport) -> String {
    let width = report
        .per_sequence
        .iter()
        .map(|s| s.sequence.len())
        .chain([8])
        .max()
        .unwrap_or(8);
    let mut out = format!(
        "{:<width$} {:>7} {:>9} {:>11}\n",
        "sequence", "mIoU", "F(region)", "F(boundary)"
    );
    let mut row = |name: &str, iou: f64, rf: f64, bf: f64| {
        let _ = writeln!(
            out,
            "{:<width$} {:>7.1} {:>9.1} {:>11.1}",
            name,
            iou * 100.0,
            rf * 100.0,
            bf * 100.0
        );
    };
    for s in &report.per_sequence {
        row(&s.sequence, s.mean_iou, s.region_f, s.boundary_f);
    }
    let d = &report.dataset;
    row("mean", d.mean_iou, d.region_f, d.boundary_f);
    out
}
