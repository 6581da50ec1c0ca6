//! Write and read Middlebury `.flo` files and binary mask PNGs.

use pseudo_gt::imaging::flo::encode_flo;
use pseudo_gt::imaging::{load_mask, read_flo, save_mask, write_flo, BinaryMask, FlowField};

fn main() -> pseudo_gt::Result<()> {
    let dir = std::env::temp_dir().join("pgt-flo-roundtrip");
    std::fs::create_dir_all(&dir).map_err(|e| pseudo_gt::Error::Io {
        path: dir.clone(),
        source: e,
    })?;

    let flow = FlowField::from_fn(4, 3, |x, y| (x as f32 * 0.5, -(y as f32)));
    let path = dir.join("field.flo");
    write_flo(&flow, &path)?;
    let back = read_flo(&path)?;
    let bytes = encode_flo(&flow);
    println!(
        "{}: {} bytes, header {:02x?}",
        path.display(),
        bytes.len(),
        &bytes[..12]
    );
    println!("round trip exact: {}", back == flow);

    let mask = BinaryMask::from_fn(9, 4, |x, y| (x + y) % 3 == 0);
    let path = dir.join("mask.png");
    save_mask(&mask, &path)?;
    println!(
        "{}: mask round trip exact: {}",
        path.display(),
        load_mask(&path)? == mask
    );
    Ok(())
}
