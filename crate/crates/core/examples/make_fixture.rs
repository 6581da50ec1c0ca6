//! Regenerates the bundled test fixtures.
//!
//! ```text
//! cargo run --example make_fixture -- crates/core/tests/fixtures
//! ```

use std::path::PathBuf;

use pseudo_gt::synthetic::{write_eval_fixture, write_tagging_fixture};

fn main() -> pseudo_gt::Result<()> {
    let root = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    write_tagging_fixture(&root.join("moving_square"))?;
    write_eval_fixture(&root.join("dataset"))?;
    println!("fixtures written to {}", root.display());
    Ok(())
}
