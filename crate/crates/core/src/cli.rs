//! The `pgt` command line: `flow`, `tag`, `eval`, `analyze` and `adapt`.
//!
//! Settings resolve in three layers: built-in defaults, then an optional
//! JSON config file (`--config`), then command line flags.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::adapt::{select_adaptation_examples, AdaptConfig};
use crate::error::{Error, Result};
use crate::eval::{
    erosion_dilation_analysis, evaluate_dataset, render_analysis_table, render_table, AnalysisRow,
    DatasetManifest, EvalConfig,
};
use crate::flow::{compute_flow, flow_magnitude, FlowParams};
use crate::imaging::{
    load_confidence, load_image, load_mask, read_flo, save_mask, save_scalar_visualization,
    write_flo,
};
use crate::tagger::{
    load_proposals, tag_from_magnitude, ProposalOverlap, Source, TagConfig, TagStatus,
    PROPOSALS_MANIFEST,
};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "PGT_WORKERS";

/// File extensions treated as frames when scanning a sequence directory.
pub const FRAME_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg", "bmp", "ppm", "pgm"];

/// Every tunable setting, as read from a `--config` file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub flow: FlowParams,
    pub tag: TagConfig,
    pub adapt: AdaptConfig,
    pub eval: EvalConfig,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pgt",
    version,
    about = "Motion-cue pseudo ground truth and VOS evaluation"
)]
pub struct Cli {
    /// JSON file with `flow`, `tag`, `adapt` and `eval` sections; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel stages (0 = one per core).
    #[arg(long, global = true, env = WORKERS_ENV, default_value_t = 0)]
    pub workers: usize,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate optical flow between two frames and write a `.flo` file.
    Flow(FlowCmd),
    /// Tag the pseudo ground truth of one frame of a sequence.
    Tag(TagCmd),
    /// Evaluate predictions listed in a dataset manifest.
    Eval(EvalCmd),
    /// IoU of an eroded and dilated pseudo ground truth against the ground truth.
    Analyze(AnalyzeCmd),
    /// Split a confidence map into positive, negative and ignored pixels.
    Adapt(AdaptCmd),
}

#[derive(Debug, Default, Args)]
pub struct FlowFlags {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub pyramid_ratio: Option<f64>,
    #[arg(long)]
    pub min_width: Option<usize>,
    #[arg(long)]
    pub outer_iterations: Option<usize>,
    #[arg(long)]
    pub inner_iterations: Option<usize>,
    #[arg(long)]
    pub sor_iterations: Option<usize>,
    #[arg(long)]
    pub sor_omega: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl FlowFlags {
    pub fn apply(&self, p: &mut FlowParams) {
        set(&mut p.alpha, self.alpha);
        set(&mut p.pyramid_ratio, self.pyramid_ratio);
        set(&mut p.min_width, self.min_width);
        set(&mut p.outer_iterations, self.outer_iterations);
        set(&mut p.inner_iterations, self.inner_iterations);
        set(&mut p.sor_iterations, self.sor_iterations);
        set(&mut p.sor_omega, self.sor_omega);
        set(&mut p.epsilon, self.epsilon);
    }
}

#[derive(Debug, Default, Args)]
pub struct TagFlags {
    #[arg(long)]
    pub flow_threshold: Option<f64>,
    #[arg(long)]
    pub normalize: Option<bool>,
    #[arg(long)]
    pub overlap_threshold: Option<f64>,
    #[arg(long)]
    pub min_flow_pixels: Option<usize>,
    #[arg(long)]
    pub largest_component_only: Option<bool>,
}

impl TagFlags {
    pub fn apply(&self, c: &mut TagConfig) {
        set(&mut c.flow_threshold, self.flow_threshold);
        set(&mut c.normalize, self.normalize);
        set(&mut c.overlap_threshold, self.overlap_threshold);
        if self.min_flow_pixels.is_some() {
            c.min_flow_pixels = self.min_flow_pixels;
        }
        set(&mut c.largest_component_only, self.largest_component_only);
    }
}

#[derive(Debug, Default, Args)]
pub struct EvalFlags {
    /// Exclude frame 0 of every sequence.
    #[arg(long)]
    pub skip_first: Option<bool>,
    /// Exclude the last frame of every sequence.
    #[arg(long)]
    pub skip_last: Option<bool>,
    /// Boundary match tolerance in pixels (default: 0.8% of the diagonal).
    #[arg(long)]
    pub boundary_tolerance: Option<u32>,
}

impl EvalFlags {
    pub fn apply(&self, c: &mut EvalConfig) {
        set(&mut c.policy.skip_first, self.skip_first);
        set(&mut c.policy.skip_last, self.skip_last);
        if self.boundary_tolerance.is_some() {
            c.boundary_tolerance = self.boundary_tolerance;
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct AdaptFlags {
    #[arg(long)]
    pub positive_threshold: Option<f64>,
    #[arg(long)]
    pub negative_distance: Option<f64>,
}

impl AdaptFlags {
    pub fn apply(&self, c: &mut AdaptConfig) {
        set(&mut c.positive_threshold, self.positive_threshold);
        set(&mut c.negative_distance, self.negative_distance);
    }
}

fn set<T: Copy>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Debug, Args)]
pub struct FlowCmd {
    #[arg(long)]
    pub first: PathBuf,
    #[arg(long)]
    pub second: PathBuf,
    /// Output `.flo` path.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the flow magnitude as a gray PNG.
    #[arg(long)]
    pub magnitude: Option<PathBuf>,
    #[command(flatten)]
    pub flow: FlowFlags,
}

#[derive(Debug, Args)]
pub struct TagCmd {
    /// Directory of frames, ordered by file name.
    #[arg(long)]
    pub sequence: PathBuf,
    /// Directory holding `proposals.json`; without it the flow fallback is used.
    #[arg(long)]
    pub proposals: Option<PathBuf>,
    /// Output directory for `pseudo_gt.png` and `provenance.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Index of the frame to tag; it is paired with the next frame.
    #[arg(long, default_value_t = 0)]
    pub frame: usize,
    /// Use this `.flo` file instead of estimating flow.
    #[arg(long)]
    pub flow_file: Option<PathBuf>,
    /// Also write the estimated flow as `flow.flo`.
    #[arg(long)]
    pub save_flow: bool,
    #[command(flatten)]
    pub flow: FlowFlags,
    #[command(flatten)]
    pub tag: TagFlags,
}

#[derive(Debug, Args)]
pub struct EvalCmd {
    /// Dataset manifest (JSON).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output report path (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the rendered table here.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub eval: EvalFlags,
}

#[derive(Debug, Args)]
pub struct AnalyzeCmd {
    #[arg(long)]
    pub pseudo_gt: PathBuf,
    #[arg(long)]
    pub ground_truth: PathBuf,
    /// Comma-separated radii in pixels; an empty value keeps only the baseline.
    #[arg(long, default_value = "5", value_parser = parse_radii)]
    pub radii: Radii,
    /// Output table path; a `.json` extension writes the rows as JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AdaptCmd {
    /// Confidence map: 8/16-bit gray raster or single-channel `.flo`.
    #[arg(long)]
    pub confidence: PathBuf,
    #[arg(long)]
    pub last_mask: PathBuf,
    /// Output directory for `positives.png`, `negatives.png` and `dontcare.png`.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub adapt: AdaptFlags,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radii(pub Vec<u32>);

fn parse_radii(s: &str) -> std::result::Result<Radii, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<u32>() {
            Ok(0) | Err(_) => Err(format!("invalid radius {t:?}: expected a positive integer")),
            Ok(r) => Ok(r),
        })
        .collect::<std::result::Result<_, _>>()
        .map(Radii)
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => fs::create_dir_all(p).map_err(|e| Error::io(p, e)),
        _ => Ok(()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    create_parent(path)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Frame files of a sequence directory, sorted by name.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut frames = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_frame = path.is_file()
            && path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| FRAME_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if is_frame {
            frames.push(path);
        }
    }
    frames.sort();
    Ok(frames)
}

pub fn cmd_flow(cmd: &FlowCmd, params: &FlowParams) -> Result<String> {
    let first = load_image(&cmd.first)?;
    let second = load_image(&cmd.second)?;
    let flow = compute_flow(&first, &second, params)?;
    create_parent(&cmd.out)?;
    write_flo(&flow, &cmd.out)?;
    if let Some(path) = &cmd.magnitude {
        create_parent(path)?;
        save_scalar_visualization(&flow_magnitude(&flow), path)?;
    }
    Ok(format!("wrote {}\n", cmd.out.display()))
}

/// Contents of `provenance.json` written next to a pseudo ground truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: Source,
    pub status: TagStatus,
    pub selected_ids: Vec<String>,
    pub frames: [String; 2],
    pub frame_index: usize,
    /// `None` when the flow was estimated rather than read from a file.
    pub flow_file: Option<String>,
    pub proposals_manifest: Option<String>,
    pub foreground_pixels: usize,
    pub moving_pixels: usize,
    pub max_magnitude: f64,
    pub min_flow_pixels: usize,
    pub overlaps: Vec<ProposalOverlap>,
    pub flow_params: FlowParams,
    pub tag_config: TagConfig,
}

pub fn cmd_tag(cmd: &TagCmd, params: &FlowParams, config: &TagConfig) -> Result<String> {
    params.validate()?;
    config.validate()?;
    let frames = list_frames(&cmd.sequence)?;
    if frames.len() < cmd.frame + 2 {
        return Err(Error::TooFewFrames {
            path: cmd.sequence.clone(),
            needed: cmd.frame + 2,
            found: frames.len(),
        });
    }
    let (first_path, second_path) = (&frames[cmd.frame], &frames[cmd.frame + 1]);
    let manifest = cmd
        .proposals
        .as_ref()
        .map(|d| d.join(PROPOSALS_MANIFEST))
        .filter(|m| m.is_file());
    let proposals = match &manifest {
        Some(m) => load_proposals(m.parent().expect("manifest has a parent"))?,
        None => {
            log::info!("no proposals manifest; using the flow fallback");
            Vec::new()
        }
    };

    let first = load_image(first_path)?;
    let flow = match &cmd.flow_file {
        Some(path) => read_flo(path)?,
        None => {
            let second = load_image(second_path)?;
            compute_flow(&first, &second, params)?
        }
    };
    if flow.dims() != first.dims() {
        return Err(Error::mismatch("tag flow", flow.dims(), first.dims()));
    }
    for p in &proposals {
        if p.mask.dims() != first.dims() {
            return Err(Error::mismatch("tag proposal", p.mask.dims(), first.dims()));
        }
    }
    let pgt = tag_from_magnitude(&flow_magnitude(&flow), &proposals, config)?;

    fs::create_dir_all(&cmd.out).map_err(|e| Error::io(&cmd.out, e))?;
    save_mask(&pgt.mask, cmd.out.join("pseudo_gt.png"))?;
    if cmd.save_flow && cmd.flow_file.is_none() {
        write_flo(&flow, cmd.out.join("flow.flo"))?;
    }
    let provenance = Provenance {
        source: pgt.source,
        status: pgt.status,
        selected_ids: pgt.selected_ids.clone(),
        frames: [file_name(first_path), file_name(second_path)],
        frame_index: cmd.frame,
        flow_file: cmd.flow_file.as_deref().map(file_name),
        proposals_manifest: manifest.map(|_| PROPOSALS_MANIFEST.to_string()),
        foreground_pixels: pgt.mask.count(),
        moving_pixels: pgt.flow_mask.count(),
        max_magnitude: pgt.max_magnitude,
        min_flow_pixels: pgt.min_flow_pixels,
        overlaps: pgt.overlaps.clone(),
        flow_params: params.clone(),
        tag_config: config.clone(),
    };
    write_text(&cmd.out.join("provenance.json"), &to_json(&provenance))?;
    let mut msg = format!(
        "source={} selected={:?} foreground={}\n",
        serde_json::to_value(pgt.source)
            .expect("enum")
            .as_str()
            .unwrap_or_default(),
        pgt.selected_ids,
        pgt.mask.count()
    );
    if pgt.status == TagStatus::DegenerateMotion {
        msg.push_str("warning: degenerate motion, pseudo ground truth is empty\n");
    }
    Ok(msg)
}

/// Runs the evaluation, writes the report and returns the rendered table.
pub fn cmd_eval(cmd: &EvalCmd, config: &EvalConfig) -> Result<String> {
    let manifest = DatasetManifest::load(&cmd.manifest)?;
    let report = evaluate_dataset(&manifest, config)?;
    write_text(&cmd.out, &report.to_json())?;
    let table = render_table(&report);
    if let Some(path) = &cmd.table {
        write_text(path, &table)?;
    }
    Ok(table)
}

/// Runs the erosion/dilation analysis, writes it and returns the rendered table.
pub fn cmd_analyze(cmd: &AnalyzeCmd) -> Result<String> {
    let pgt = load_mask(&cmd.pseudo_gt)?;
    let gt = load_mask(&cmd.ground_truth)?;
    let rows: Vec<AnalysisRow> = erosion_dilation_analysis(&pgt, &gt, &cmd.radii.0)?;
    let table = render_analysis_table(&rows);
    let is_json = cmd
        .out
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    write_text(
        &cmd.out,
        &if is_json {
            to_json(&rows)
        } else {
            table.clone()
        },
    )?;
    Ok(table)
}

pub fn cmd_adapt(cmd: &AdaptCmd, config: &AdaptConfig) -> Result<String> {
    let confidence = load_confidence(&cmd.confidence)?;
    let last = load_mask(&cmd.last_mask)?;
    let ex = select_adaptation_examples(&confidence, &last, config)?;
    fs::create_dir_all(&cmd.out).map_err(|e| Error::io(&cmd.out, e))?;
    save_mask(&ex.positives, cmd.out.join("positives.png"))?;
    save_mask(&ex.negatives, cmd.out.join("negatives.png"))?;
    save_mask(&ex.dontcare, cmd.out.join("dontcare.png"))?;
    write_text(&cmd.out.join("adapt.json"), &to_json(config))?;
    Ok(format!(
        "positives={} negatives={} dontcare={}\n",
        ex.positives.count(),
        ex.negatives.count(),
        ex.dontcare.count()
    ))
}

/// Executes a parsed command line and returns what should go to stdout.
pub fn run(cli: &Cli) -> Result<String> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Flow(cmd) => {
            cmd.flow.apply(&mut config.flow);
            cmd_flow(cmd, &config.flow)
        }
        Command::Tag(cmd) => {
            cmd.flow.apply(&mut config.flow);
            cmd.tag.apply(&mut config.tag);
            cmd_tag(cmd, &config.flow, &config.tag)
        }
        Command::Eval(cmd) => {
            cmd.eval.apply(&mut config.eval);
            cmd_eval(cmd, &config.eval)
        }
        Command::Analyze(cmd) => cmd_analyze(cmd),
        Command::Adapt(cmd) => {
            cmd.adapt.apply(&mut config.adapt);
            cmd_adapt(cmd, &config.adapt)
        }
    })
}

/// Entry point of the `pgt` binary.
pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
