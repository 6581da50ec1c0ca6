//! Binary erosion and dilation with a Euclidean disk structuring element.
//!
//! The disk of radius `r` is `{(dx, dy) : dx² + dy² ≤ r²}`. Pixels outside
//! the raster are background for both operations, so erosion eats into
//! masks that touch the border and dilation is clipped at it.

use crate::imaging::distance::squared_distance_transform;
use crate::imaging::BinaryMask;

/// Squared radius of the disk structuring element.
fn disk_sq(radius: u32) -> u64 {
    u64::from(radius) * u64::from(radius)
}

/// Every pixel whose disk of `radius` touches the mask.
pub fn dilate(mask: &BinaryMask, radius: u32) -> BinaryMask {
    let (w, h) = mask.dims();
    let Some(sq) = squared_distance_transform(mask) else {
        return BinaryMask::empty(w, h);
    };
    let r2 = disk_sq(radius);
    BinaryMask::from_vec(w, h, sq.into_iter().map(|d| d <= r2).collect())
        .expect("dimensions preserved")
}

/// Every mask pixel whose whole disk of `radius` lies inside the mask.
pub fn erode(mask: &BinaryMask, radius: u32) -> BinaryMask {
    let (w, h) = mask.dims();
    let r2 = disk_sq(radius);
    let background = squared_distance_transform(&mask.complement());
    BinaryMask::from_fn(w, h, |x, y| {
        if !mask.get(x, y) {
            return false;
        }
        // nearest pixel outside the raster lies straight across the closest edge
        let edge = (x + 1).min(w - x).min(y + 1).min(h - y) as u64;
        let mut nearest = edge * edge;
        if let Some(bg) = &background {
            nearest = nearest.min(bg[y * w + x]);
        }
        nearest > r2
    })
}

/// Offsets of the disk structuring element, for callers that need it explicitly.
pub fn disk_offsets(radius: u32) -> Vec<(i64, i64)> {
    let r = i64::from(radius);
    let r2 = r * r;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r2 {
                out.push((dx, dy));
            }
        }
    }
    out
}
