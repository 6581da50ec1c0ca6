//! 8-connected component labeling.

use crate::imaging::BinaryMask;

/// One connected region of a mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// 1-based label; components are numbered by descending size.
    pub label: usize,
    pub size: usize,
    pub mask: BinaryMask,
}

/// Splits `mask` into 8-connected components, largest first.
///
/// Components of equal size keep raster order of their first pixel.
pub fn connected_components(mask: &BinaryMask) -> Vec<Component> {
    let (w, h) = mask.dims();
    let mut seen = vec![false; w * h];
    let mut found = Vec::new();
    let mut stack = Vec::new();

    for start in 0..w * h {
        if !mask.data()[start] || seen[start] {
            continue;
        }
        let mut region = BinaryMask::empty(w, h);
        let mut size = 0;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            region.set(x, y, true);
            size += 1;
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    let j = ny * w + nx;
                    if mask.data()[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        found.push((size, region));
    }

    found.sort_by_key(|c| std::cmp::Reverse(c.0));
    found
        .into_iter()
        .enumerate()
        .map(|(i, (size, mask))| Component {
            label: i + 1,
            size,
            mask,
        })
        .collect()
}

/// The largest 8-connected component, or an empty mask.
pub fn largest_component(mask: &BinaryMask) -> BinaryMask {
    connected_components(mask)
        .into_iter()
        .next()
        .map(|c| c.mask)
        .unwrap_or_else(|| BinaryMask::empty(mask.width(), mask.height()))
}
