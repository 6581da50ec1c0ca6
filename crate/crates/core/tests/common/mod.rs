//! Brute-force oracles and random inputs shared by the integration tests.
#![allow(dead_code)]

use pseudo_gt::flow::FlowParams;
use pseudo_gt::imaging::{BinaryMask, FlowField, Image};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mask(rng: &mut impl Rng, w: usize, h: usize) -> BinaryMask {
    let density: f64 = rng.gen_range(0.0..1.0);
    BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(density))
}

/// Random mask of random size in `1..=max` per side.
pub fn random_sized_mask(rng: &mut impl Rng, max: usize) -> BinaryMask {
    let w = rng.gen_range(1..=max);
    let h = rng.gen_range(1..=max);
    random_mask(rng, w, h)
}

fn in_disk(dx: i64, dy: i64, r: u32) -> bool {
    dx * dx + dy * dy <= i64::from(r) * i64::from(r)
}

/// Pixels having some foreground pixel within the disk of radius `r`.
pub fn brute_dilate(m: &BinaryMask, r: u32) -> BinaryMask {
    let (w, h) = m.dims();
    BinaryMask::from_fn(w, h, |x, y| {
        m.foreground()
            .any(|(fx, fy)| in_disk(fx as i64 - x as i64, fy as i64 - y as i64, r))
    })
}

/// Pixels whose whole disk of radius `r` lies inside the raster and the mask.
pub fn brute_erode(m: &BinaryMask, r: u32) -> BinaryMask {
    let (w, h) = m.dims();
    let ri = i64::from(r);
    BinaryMask::from_fn(w, h, |x, y| {
        for dy in -ri..=ri {
            for dx in -ri..=ri {
                if !in_disk(dx, dy, r) {
                    continue;
                }
                let (px, py) = (x as i64 + dx, y as i64 + dy);
                if px < 0 || py < 0 || px >= w as i64 || py >= h as i64 {
                    return false;
                }
                if !m.get(px as usize, py as usize) {
                    return false;
                }
            }
        }
        true
    })
}

/// Nearest-foreground Euclidean distance by exhaustive scan.
pub fn brute_distance(m: &BinaryMask) -> Vec<f64> {
    let (w, h) = m.dims();
    let fg: Vec<(usize, usize)> = m.foreground().collect();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let best = fg
                .iter()
                .map(|&(fx, fy)| {
                    let dx = fx as f64 - x as f64;
                    let dy = fy as f64 - y as f64;
                    (dx * dx + dy * dy).sqrt()
                })
                .fold(f64::MAX, f64::min);
            out.push(best);
        }
    }
    out
}

/// (true positives, false positives, false negatives) by pixel scan.
pub fn confusion(pred: &BinaryMask, gt: &BinaryMask) -> (usize, usize, usize) {
    let (mut tp, mut fp, mut fneg) = (0, 0, 0);
    for (&p, &g) in pred.data().iter().zip(gt.data()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            _ => {}
        }
    }
    (tp, fp, fneg)
}

pub fn oracle_iou(pred: &BinaryMask, gt: &BinaryMask) -> f64 {
    let (tp, fp, fneg) = confusion(pred, gt);
    if tp + fp + fneg == 0 {
        1.0
    } else {
        tp as f64 / (tp + fp + fneg) as f64
    }
}

pub fn oracle_region(pred: &BinaryMask, gt: &BinaryMask) -> (f64, f64, f64) {
    let (tp, fp, fneg) = confusion(pred, gt);
    if tp + fp + fneg == 0 {
        return (1.0, 1.0, 1.0);
    }
    let p = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let r = if tp + fneg == 0 {
        0.0
    } else {
        tp as f64 / (tp + fneg) as f64
    };
    let f = if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    };
    (p, r, f)
}

/// Discrete robust flow energy evaluated from its definition:
///
/// `Σ ψ((I₂(x + w) − I₁(x))²) + α Σ ψ(|∇u|² + |∇v|²)`, `ψ(s²) = sqrt(s² + ε²)`,
/// with clamped bilinear sampling and forward differences that vanish at the
/// last row and column.
pub fn oracle_energy(fixed: &Image, second: &Image, flow: &FlowField, p: &FlowParams) -> f64 {
    let (w, h) = fixed.dims();
    let psi = |s2: f64| (s2 + p.epsilon * p.epsilon).sqrt();
    let pixel = |x: usize, y: usize| f64::from(second.get(x, y, 0));
    let bilinear = |x: f64, y: f64| {
        let x = x.max(0.0).min((w - 1) as f64);
        let y = y.max(0.0).min((h - 1) as f64);
        let (xi, yi) = (x as usize, y as usize);
        let (a, b) = (x - xi as f64, y - yi as f64);
        let xn = if xi + 1 < w { xi + 1 } else { xi };
        let yn = if yi + 1 < h { yi + 1 } else { yi };
        pixel(xi, yi) * (1.0 - a) * (1.0 - b)
            + pixel(xn, yi) * a * (1.0 - b)
            + pixel(xi, yn) * (1.0 - a) * b
            + pixel(xn, yn) * a * b
    };
    let comp = |x: usize, y: usize| {
        let (u, v) = flow.get(x, y);
        (f64::from(u), f64::from(v))
    };

    let mut data = Vec::with_capacity(w * h);
    let mut smooth = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (u, v) = comp(x, y);
            let residual = bilinear(x as f64 + u, y as f64 + v) - f64::from(fixed.get(x, y, 0));
            data.push(psi(residual * residual));

            let mut g = 0.0;
            if x + 1 < w {
                let (u1, v1) = comp(x + 1, y);
                g += (u1 - u).powi(2) + (v1 - v).powi(2);
            }
            if y + 1 < h {
                let (u1, v1) = comp(x, y + 1);
                g += (u1 - u).powi(2) + (v1 - v).powi(2);
            }
            smooth.push(psi(g));
        }
    }
    data.iter().sum::<f64>() + p.alpha * smooth.iter().sum::<f64>()
}

/// Random gray image with smooth structure plus noise, values in `[0, 1]`.
pub fn random_image(rng: &mut impl Rng, w: usize, h: usize) -> Image {
    let (fx, fy, phase): (f64, f64, f64) = (
        rng.gen_range(0.1..0.6),
        rng.gen_range(0.1..0.6),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    Image::from_fn(w, h, |x, y| {
        let base = 0.5 + 0.3 * (fx * x as f64 + fy * y as f64 + phase).sin();
        (base + rng.gen_range(-0.15..0.15)) as f32
    })
}

/// Mean endpoint error against a constant flow over the central crop
/// keeping `keep` of each side.
pub fn central_epe(flow: &FlowField, dx: f64, dy: f64, keep: f64) -> f64 {
    let (w, h) = flow.dims();
    let mx = ((w as f64) * (1.0 - keep) / 2.0).round() as usize;
    let my = ((h as f64) * (1.0 - keep) / 2.0).round() as usize;
    let mut sum = 0.0;
    let mut n = 0usize;
    for y in my..h - my {
        for x in mx..w - mx {
            let (u, v) = flow.get(x, y);
            sum += (f64::from(u) - dx).hypot(f64::from(v) - dy);
            n += 1;
        }
    }
    sum / n as f64
}

/// Random smooth texture and a copy moved by a random sub-pixel shift of at
/// most 2 px, with independent noise on both frames.
pub fn random_moving_pair(rng: &mut impl Rng, n: usize) -> (Image, Image) {
    let t = pseudo_gt::synthetic::Texture::new(rng.gen());
    let (dx, dy) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let noise = 0.02;
    let mut frame = |ox: f64, oy: f64| {
        Image::from_fn(n, n, |x, y| {
            (t.at(x as f64 - ox, y as f64 - oy) + rng.gen_range(-noise..noise)) as f32
        })
    };
    let a = frame(0.0, 0.0);
    let b = frame(dx, dy);
    (a, b)
}
