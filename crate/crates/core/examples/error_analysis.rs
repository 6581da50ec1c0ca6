//! How much IoU is lost when the pseudo ground truth is eroded or dilated.

use pseudo_gt::eval::{erosion_dilation_analysis, render_analysis_table};
use pseudo_gt::imaging::BinaryMask;

fn main() -> pseudo_gt::Result<()> {
    let truth = BinaryMask::from_fn(96, 96, |x, y| {
        let (dx, dy) = (x as f64 - 48.0, y as f64 - 44.0);
        (dx / 30.0).powi(2) + (dy / 20.0).powi(2) <= 1.0
    });
    let rows = erosion_dilation_analysis(&truth, &truth, &[1, 3, 5, 8])?;
    print!("{}", render_analysis_table(&rows));
    Ok(())
}
