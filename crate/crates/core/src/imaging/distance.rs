//! Exact Euclidean distance transform.
//!
//! Separable lower-envelope-of-parabolas algorithm run on squared integer
//! distances, so every reported distance is the square root of an exact
//! integer.

use crate::imaging::{BinaryMask, ScalarMap};

/// Value reported for every pixel of an all-background mask.
pub const NO_FOREGROUND_DISTANCE: f64 = f64::MAX;

/// 1-D squared distance transform over `f`, where `None` marks "no site".
/// Writes `min_j (i - j)² + f[j]` into `out`, or `None` if `f` has no sites.
fn transform_line(
    f: &[Option<u64>],
    out: &mut [Option<u64>],
    sites: &mut Vec<usize>,
    bounds: &mut Vec<f64>,
) {
    sites.clear();
    bounds.clear();
    let key = |q: usize| f[q].map(|fq| fq as f64 + (q * q) as f64);
    for q in 0..f.len() {
        let Some(kq) = key(q) else { continue };
        loop {
            let Some(&v) = sites.last() else {
                sites.push(q);
                bounds.push(f64::NEG_INFINITY);
                break;
            };
            let kv = key(v).expect("sites carry values");
            let s = (kq - kv) / (2.0 * (q - v) as f64);
            if s <= *bounds.last().unwrap() {
                sites.pop();
                bounds.pop();
            } else {
                sites.push(q);
                bounds.push(s);
                break;
            }
        }
    }
    if sites.is_empty() {
        out.fill(None);
        return;
    }
    let mut k = 0;
    for (q, slot) in out.iter_mut().enumerate() {
        while k + 1 < sites.len() && bounds[k + 1] < q as f64 {
            k += 1;
        }
        let v = sites[k];
        let d = q.abs_diff(v) as u64;
        *slot = Some(d * d + f[v].unwrap());
    }
}

/// Squared distance from every pixel to the nearest foreground pixel, or
/// `None` when the mask has no foreground.
pub fn squared_distance_transform(mask: &BinaryMask) -> Option<Vec<u64>> {
    if mask.is_empty() {
        return None;
    }
    let (w, h) = mask.dims();
    let mut grid: Vec<Option<u64>> = mask.data().iter().map(|&b| b.then_some(0)).collect();
    let mut sites = Vec::new();
    let mut bounds = Vec::new();

    let mut line = vec![None; h];
    let mut out = vec![None; h];
    for x in 0..w {
        for y in 0..h {
            line[y] = grid[y * w + x];
        }
        transform_line(&line, &mut out, &mut sites, &mut bounds);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }

    let mut row_out = vec![None; w];
    for y in 0..h {
        let row = &mut grid[y * w..(y + 1) * w];
        transform_line(row, &mut row_out, &mut sites, &mut bounds);
        row.copy_from_slice(&row_out);
    }

    Some(
        grid.into_iter()
            .map(|d| d.expect("a foreground pixel reaches every pixel"))
            .collect(),
    )
}

/// Euclidean distance from each pixel to the nearest foreground pixel.
///
/// Foreground pixels map to 0. An all-background mask maps every pixel to
/// [`NO_FOREGROUND_DISTANCE`].
pub fn distance_transform(mask: &BinaryMask) -> ScalarMap {
    let (w, h) = mask.dims();
    let data = match squared_distance_transform(mask) {
        Some(sq) => sq.into_iter().map(|d| (d as f64).sqrt()).collect(),
        None => vec![NO_FOREGROUND_DISTANCE; w * h],
    };
    ScalarMap::from_raw_unchecked(w, h, data)
}
