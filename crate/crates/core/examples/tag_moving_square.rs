//! Tag the pseudo ground truth of a synthetic moving square, first with
//! instance proposals and then with the flow fallback.

use pseudo_gt::eval::iou;
use pseudo_gt::flow::FlowParams;
use pseudo_gt::imaging::BinaryMask;
use pseudo_gt::synthetic::moving_square;
use pseudo_gt::tagger::{make_pseudo_gt, InstanceProposal, TagConfig};

fn main() -> pseudo_gt::Result<()> {
    let scene = moving_square(128, 128, 40, 40, 40, 4, 0, 7);
    let proposals = vec![
        InstanceProposal::new("square", "object", 0.97, scene.square.clone())?,
        InstanceProposal::new(
            "shifted",
            "object",
            0.91,
            BinaryMask::rect(128, 128, 60, 40, 40, 40),
        )?,
        InstanceProposal::new(
            "corner",
            "object",
            0.88,
            BinaryMask::rect(128, 128, 96, 96, 24, 24),
        )?,
    ];
    let flow = FlowParams::default();
    let config = TagConfig::default();

    let tagged = make_pseudo_gt(&scene.first, &scene.second, &proposals, &flow, &config)?;
    println!(
        "max flow magnitude {:.2} px, {} moving pixels",
        tagged.max_magnitude,
        tagged.flow_mask.count()
    );
    for o in &tagged.overlaps {
        println!(
            "  {:<8} overlap {:.3} {}",
            o.id,
            o.overlap,
            if o.selected { "selected" } else { "" }
        );
    }
    println!(
        "source {:?}, IoU vs truth {:.3}",
        tagged.source,
        iou(&tagged.mask, &scene.square)?
    );

    let fallback = make_pseudo_gt(&scene.first, &scene.second, &[], &flow, &config)?;
    println!(
        "without proposals: source {:?}, {} pixels, IoU vs truth {:.3}",
        fallback.source,
        fallback.mask.count(),
        iou(&fallback.mask, &scene.square)?
    );
    Ok(())
}
