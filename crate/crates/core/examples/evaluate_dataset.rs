//! Evaluate a dataset manifest and print the per-sequence table.
//!
//! ```text
//! cargo run --example evaluate_dataset -- crates/core/tests/fixtures/dataset/dataset.json
//! ```
//!
//! Without an argument a small dataset is generated in a temporary directory.

use pseudo_gt::eval::{evaluate_dataset, render_table, DatasetManifest, EvalConfig, FramePolicy};
use pseudo_gt::synthetic::write_eval_fixture;

fn main() -> pseudo_gt::Result<()> {
    let tmp = std::env::temp_dir().join("pgt-evaluate-dataset");
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            write_eval_fixture(&tmp)?;
            tmp.join("dataset.json")
        }
    };
    let manifest = DatasetManifest::load(&path)?;

    let report = evaluate_dataset(&manifest, &EvalConfig::default())?;
    println!("frame 0 excluded (default):\n{}", render_table(&report));

    let all = EvalConfig {
        policy: FramePolicy::ALL_FRAMES,
        ..EvalConfig::default()
    };
    let report = evaluate_dataset(&manifest, &all)?;
    println!("all frames:\n{}", render_table(&report));
    for f in &report.per_frame {
        println!("  {} #{}: IoU {:.3}", f.sequence, f.frame_index, f.iou);
    }
    Ok(())
}
