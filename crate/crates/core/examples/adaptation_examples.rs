//! Split a confidence map into positive, negative and ignored pixels.

use pseudo_gt::adapt::{select_adaptation_examples, AdaptConfig};
use pseudo_gt::imaging::{BinaryMask, ScalarMap};

fn main() -> pseudo_gt::Result<()> {
    let (w, h) = (80, 40);
    let last = BinaryMask::rect(w, h, 10, 10, 12, 12);
    let confidence = ScalarMap::from_fn(w, h, |x, y| {
        let d = (x as f64 - 16.0).hypot(y as f64 - 16.0);
        (1.0 - d / 12.0).clamp(0.0, 1.0)
    });
    let config = AdaptConfig {
        negative_distance: 30.0,
        ..AdaptConfig::default()
    };
    let ex = select_adaptation_examples(&confidence, &last, &config)?;
    println!(
        "positives {}  negatives {}  ignored {}",
        ex.positives.count(),
        ex.negatives.count(),
        ex.dontcare.count()
    );
    for y in (0..h).step_by(2) {
        let row: String = (0..w)
            .map(|x| match (ex.positives.get(x, y), ex.negatives.get(x, y)) {
                (true, _) => '+',
                (_, true) => '-',
                _ => '.',
            })
            .collect();
        println!("{row}");
    }
    Ok(())
}
