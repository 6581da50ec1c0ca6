//! Single-level robust variational solver.
//!
//! Energy minimized at one pyramid level, for a flow `w = (u, v)`:
//!
//! ```text
//! E(w) = Σ ψ((I₂(x + w(x)) − I₁(x))²) + α Σ ψ(|∇u|² + |∇v|²),   ψ(s²) = sqrt(s² + ε²)
//! ```
//!
//! with forward differences for `∇` (zero across the last row and column).
//! Each outer iteration warps the second image by the current estimate and
//! linearizes the data term around it. Inner iterations freeze the robust
//! weights `ψ′` (iteratively reweighted least squares) and SOR sweeps solve
//! the resulting symmetric positive definite system. A step that raises `E`
//! is halved until it does not; if no halving helps the level stops early.

use crate::error::{Error, Result};
use crate::flow::FlowParams;
use crate::imaging::{bilinear_warp, FlowField, Image};

/// Step halvings tried before an outer iteration is abandoned.
const MAX_BACKTRACKS: usize = 8;

/// State reported after every accepted outer iteration.
#[derive(Debug)]
pub struct LevelSnapshot<'a> {
    /// Pyramid level, 0 = coarsest.
    pub level: usize,
    /// 0 for the initial flow of the level, then one per accepted relinearization.
    pub iteration: usize,
    pub fixed: &'a Image,
    pub second: &'a Image,
    /// Full flow estimate (initial flow plus accumulated increment).
    pub flow: &'a FlowField,
    /// Energy of `flow`, as evaluated by [`robust_energy`].
    pub energy: f64,
}

/// Bilinear sample in `f64` with clamped coordinates.
fn sample(data: &[f32], w: usize, h: usize, x: f64, y: f64) -> f64 {
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let at = |xx: usize, yy: usize| f64::from(data[yy * w + xx]);
    (1.0 - fy) * ((1.0 - fx) * at(x0, y0) + fx * at(x1, y0))
        + fy * ((1.0 - fx) * at(x0, y1) + fx * at(x1, y1))
}

/// Discrete robust energy of `flow` for the pair `(fixed, second)`.
///
/// Both images must be single-channel and share the flow's dimensions.
pub fn robust_energy(fixed: &Image, second: &Image, flow: &FlowField, params: &FlowParams) -> f64 {
    let (w, h) = fixed.dims();
    let eps2 = params.epsilon * params.epsilon;
    let mut data_term = 0.0;
    let mut smooth_term = 0.0;
    for y in 0..h {
        for x in 0..w {
            let (u, v) = flow.get(x, y);
            let warped = sample(
                second.data(),
                w,
                h,
                x as f64 + f64::from(u),
                y as f64 + f64::from(v),
            );
            let r = warped - f64::from(fixed.get(x, y, 0));
            data_term += (r * r + eps2).sqrt();

            let (ux, vx) = if x + 1 < w {
                let (u1, v1) = flow.get(x + 1, y);
                (f64::from(u1) - f64::from(u), f64::from(v1) - f64::from(v))
            } else {
                (0.0, 0.0)
            };
            let (uy, vy) = if y + 1 < h {
                let (u1, v1) = flow.get(x, y + 1);
                (f64::from(u1) - f64::from(u), f64::from(v1) - f64::from(v))
            } else {
                (0.0, 0.0)
            };
            smooth_term += (ux * ux + uy * uy + vx * vx + vy * vy + eps2).sqrt();
        }
    }
    data_term + params.alpha * smooth_term
}

/// Five-point central derivative `[1, −8, 0, 8, −1] / 12` with clamped borders.
fn derivatives(img: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |x: i64, y: i64| {
        img[(y.clamp(0, h as i64 - 1) as usize) * w + x.clamp(0, w as i64 - 1) as usize]
    };
    let mut dx = vec![0.0; w * h];
    let mut dy = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            dx[i] = (at(x - 2, y) - 8.0 * at(x - 1, y) + 8.0 * at(x + 1, y) - at(x + 2, y)) / 12.0;
            dy[i] = (at(x, y - 2) - 8.0 * at(x, y - 1) + 8.0 * at(x, y + 1) - at(x, y + 2)) / 12.0;
        }
    }
    (dx, dy)
}

fn add_scaled(base: &FlowField, du: &[f64], dv: &[f64], t: f64) -> FlowField {
    let mut out = base.clone();
    let (w, h) = base.dims();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let (u, v) = base.get(x, y);
            out.set(
                x,
                y,
                (f64::from(u) + t * du[i]) as f32,
                (f64::from(v) + t * dv[i]) as f32,
            );
        }
    }
    out
}

/// Solves for the increment `du, dv` of one linearization around `flow`.
fn linearized_step(
    fixed: &Image,
    second: &Image,
    flow: &FlowField,
    params: &FlowParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (w, h) = fixed.dims();
    let n = w * h;
    let warped = bilinear_warp(second, flow)?;
    let f1: Vec<f64> = fixed.data().iter().map(|&v| f64::from(v)).collect();
    let f2: Vec<f64> = warped.data().iter().map(|&v| f64::from(v)).collect();
    let mean: Vec<f64> = f1.iter().zip(&f2).map(|(a, b)| 0.5 * (a + b)).collect();
    let (mut ix, mut iy) = derivatives(&mean, w, h);
    let mut it: Vec<f64> = f2.iter().zip(&f1).map(|(b, a)| b - a).collect();
    let u0: Vec<f64> = flow
        .data()
        .iter()
        .step_by(2)
        .map(|&v| f64::from(v))
        .collect();
    let v0: Vec<f64> = flow
        .data()
        .iter()
        .skip(1)
        .step_by(2)
        .map(|&v| f64::from(v))
        .collect();
    // a clamped sample outside the frame does not vary with the flow
    for i in 0..n {
        let tx = (i % w) as f64 + u0[i];
        let ty = (i / w) as f64 + v0[i];
        if tx < 0.0 || ty < 0.0 || tx > (w - 1) as f64 || ty > (h - 1) as f64 {
            ix[i] = 0.0;
            iy[i] = 0.0;
            it[i] = 0.0;
        }
    }

    let eps2 = params.epsilon * params.epsilon;
    let alpha = params.alpha;
    let omega = params.sor_omega;
    let mut du = vec![0.0; n];
    let mut dv = vec![0.0; n];
    let mut wd = vec![0.0; n];
    let mut ws = vec![0.0; n];

    for _ in 0..params.inner_iterations {
        for i in 0..n {
            let r = it[i] + ix[i] * du[i] + iy[i] * dv[i];
            wd[i] = 1.0 / (r * r + eps2).sqrt();
        }
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let (mut g, uc, vc) = (0.0, u0[i] + du[i], v0[i] + dv[i]);
                if x + 1 < w {
                    let a = u0[i + 1] + du[i + 1] - uc;
                    let b = v0[i + 1] + dv[i + 1] - vc;
                    g += a * a + b * b;
                }
                if y + 1 < h {
                    let a = u0[i + w] + du[i + w] - uc;
                    let b = v0[i + w] + dv[i + w] - vc;
                    g += a * a + b * b;
                }
                ws[i] = 1.0 / (g + eps2).sqrt();
            }
        }

        for _ in 0..params.sor_iterations {
            for y in 0..h {
                for x in 0..w {
                    let i = y * w + x;
                    // smoothness edges: (neighbour index, edge weight)
                    let mut weight_sum = 0.0;
                    let mut su = 0.0;
                    let mut sv = 0.0;
                    let mut edge = |j: usize, we: f64| {
                        weight_sum += we;
                        su += we * (u0[j] - u0[i] + du[j]);
                        sv += we * (v0[j] - v0[i] + dv[j]);
                    };
                    if x + 1 < w {
                        edge(i + 1, ws[i]);
                    }
                    if x > 0 {
                        edge(i - 1, ws[i - 1]);
                    }
                    if y + 1 < h {
                        edge(i + w, ws[i]);
                    }
                    if y > 0 {
                        edge(i - w, ws[i - w]);
                    }
                    let (a11, a12, a22) = (
                        wd[i] * ix[i] * ix[i],
                        wd[i] * ix[i] * iy[i],
                        wd[i] * iy[i] * iy[i],
                    );
                    let den_u = a11 + alpha * weight_sum;
                    if den_u > 0.0 {
                        let num = -wd[i] * ix[i] * it[i] - a12 * dv[i] + alpha * su;
                        du[i] = (1.0 - omega) * du[i] + omega * num / den_u;
                    }
                    let den_v = a22 + alpha * weight_sum;
                    if den_v > 0.0 {
                        let num = -wd[i] * iy[i] * it[i] - a12 * du[i] + alpha * sv;
                        dv[i] = (1.0 - omega) * dv[i] + omega * num / den_v;
                    }
                }
            }
        }
    }

    if du.iter().chain(&dv).any(|v| !v.is_finite()) {
        return Err(Error::Internal("non-finite flow increment".into()));
    }
    Ok((du, dv))
}

fn check_inputs(fixed: &Image, second: &Image, flow: &FlowField) -> Result<()> {
    if fixed.dims() != second.dims() {
        return Err(Error::mismatch("solve_level", fixed.dims(), second.dims()));
    }
    if fixed.dims() != flow.dims() {
        return Err(Error::mismatch("solve_level", fixed.dims(), flow.dims()));
    }
    if fixed.channels() != 1 || second.channels() != 1 {
        return Err(Error::InvalidRaster(
            "solve_level expects grayscale images".into(),
        ));
    }
    Ok(())
}

/// Refines `flow` at one level and returns the increment to add to it.
///
/// `second` is the unwarped second image; it is re-warped by the current
/// estimate at every outer iteration.
pub fn solve_level(
    fixed: &Image,
    second: &Image,
    flow: &FlowField,
    params: &FlowParams,
) -> Result<FlowField> {
    solve_level_observed(fixed, second, flow, params, 0, &mut |_| {})
}

/// [`solve_level`] that reports every accepted estimate to `observer`.
pub fn solve_level_observed(
    fixed: &Image,
    second: &Image,
    flow: &FlowField,
    params: &FlowParams,
    level: usize,
    observer: &mut dyn FnMut(&LevelSnapshot<'_>),
) -> Result<FlowField> {
    check_inputs(fixed, second, flow)?;
    let mut current = flow.clone();
    let mut energy = robust_energy(fixed, second, &current, params);
    if !energy.is_finite() {
        return Err(Error::Internal("non-finite energy".into()));
    }
    observer(&LevelSnapshot {
        level,
        iteration: 0,
        fixed,
        second,
        flow: &current,
        energy,
    });

    for iteration in 1..=params.outer_iterations {
        let (du, dv) = linearized_step(fixed, second, &current, params)?;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let candidate = add_scaled(&current, &du, &dv, t);
            let e = robust_energy(fixed, second, &candidate, params);
            if e <= energy {
                accepted = Some((candidate, e));
                break;
            }
            t *= 0.5;
        }
        let Some((next, e)) = accepted else {
            log::debug!("level {level}: no descent at outer iteration {iteration}, stopping");
            break;
        };
        current = next;
        energy = e;
        observer(&LevelSnapshot {
            level,
            iteration,
            fixed,
            second,
            flow: &current,
            energy,
        });
    }

    let (w, h) = flow.dims();
    let data = current
        .data()
        .iter()
        .zip(flow.data())
        .map(|(a, b)| a - b)
        .collect();
    FlowField::from_vec(w, h, data).map_err(|_| Error::Internal("non-finite flow increment".into()))
}
