//! Disk erosion and dilation, distance transform and connected components.

use pseudo_gt::imaging::{connected_components, dilate, distance_transform, erode, BinaryMask};

fn show(name: &str, m: &BinaryMask) {
    println!("{name} ({} px)", m.count());
    for y in 0..m.height() {
        let row: String = (0..m.width())
            .map(|x| if m.get(x, y) { '#' } else { '.' })
            .collect();
        println!("  {row}");
    }
}

fn main() {
    let square = BinaryMask::rect(14, 14, 2, 2, 10, 10);
    show("square", &square);
    show("eroded r=2", &erode(&square, 2));
    let mut dot = BinaryMask::empty(9, 9);
    dot.set(4, 4, true);
    show("pixel dilated r=3", &dilate(&dot, 3));

    let dt = distance_transform(&dot);
    println!("distance from (4,4) to (0,1): {}", dt.get(0, 1));

    let blobs = BinaryMask::rect(12, 6, 0, 0, 4, 3).union(&BinaryMask::rect(12, 6, 7, 2, 5, 4));
    for c in connected_components(&blobs) {
        println!("component {}: {} px", c.label, c.size);
    }
}
