//! Deterministic synthetic scenes for demos, fixtures and self-checks.

use std::fs;
use std::path::Path;

use serde_json::json;

use crate::error::{Error, Result};
use crate::imaging::{save_image, save_mask, BinaryMask, Image};

/// SplitMix64 step; enough randomness for texture parameters.
fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit(state: &mut u64) -> f64 {
    (splitmix(state) >> 11) as f64 / (1u64 << 53) as f64
}

/// Smooth band-limited texture defined on the whole plane.
#[derive(Clone, Debug)]
pub struct Texture {
    waves: Vec<(f64, f64, f64, f64)>,
}

impl Texture {
    /// Sum of 12 plane waves with wavelengths between 6 and 40 pixels.
    pub fn new(seed: u64) -> Self {
        Self::with_wavelengths(seed, 6.0, 40.0)
    }

    /// Sum of 12 plane waves with wavelengths drawn from `[min, max]` pixels.
    pub fn with_wavelengths(seed: u64, min: f64, max: f64) -> Self {
        let mut s = seed ^ 0x5EED_0000_0000_0001;
        let waves = (0..12)
            .map(|_| {
                let wavelength = min + (max - min) * unit(&mut s);
                let angle = std::f64::consts::TAU * unit(&mut s);
                let k = std::f64::consts::TAU / wavelength;
                let phase = std::f64::consts::TAU * unit(&mut s);
                let amp = 0.5 + 0.5 * unit(&mut s);
                (k * angle.cos(), k * angle.sin(), phase, amp)
            })
            .collect();
        Texture { waves }
    }

    /// Value in `[0.05, 0.95]` at a real-valued point.
    pub fn at(&self, x: f64, y: f64) -> f64 {
        let total: f64 = self.waves.iter().map(|w| w.3).sum();
        let s: f64 = self
            .waves
            .iter()
            .map(|&(kx, ky, phase, amp)| amp * (kx * x + ky * y + phase).sin())
            .sum();
        0.5 + 0.45 * s / total
    }

    /// Raster of the texture translated by `(dx, dy)`: `out(x) = T(x − d)`.
    pub fn render(&self, width: usize, height: usize, dx: f64, dy: f64) -> Image {
        Image::from_fn(width, height, |x, y| {
            self.at(x as f64 - dx, y as f64 - dy) as f32
        })
    }
}

/// Frame pair whose true flow from the first to the second frame is `(dx, dy)`
/// everywhere.
pub fn translated_pair(width: usize, height: usize, dx: f64, dy: f64, seed: u64) -> (Image, Image) {
    let t = Texture::new(seed);
    (
        t.render(width, height, 0.0, 0.0),
        t.render(width, height, dx, dy),
    )
}

/// Two frames of a textured square moving over a static textured background.
#[derive(Clone, Debug)]
pub struct MovingSquare {
    pub first: Image,
    pub second: Image,
    /// The square's footprint in the first frame.
    pub square: BinaryMask,
}

/// `size × size` square at `(x0, y0)` moving by `(dx, dy)` whole pixels.
#[allow(clippy::too_many_arguments)]
pub fn moving_square(
    width: usize,
    height: usize,
    x0: usize,
    y0: usize,
    size: usize,
    dx: i64,
    dy: i64,
    seed: u64,
) -> MovingSquare {
    let background = Texture::new(seed);
    let foreground = Texture::new(seed.wrapping_add(1));
    let frame = |ox: i64, oy: i64| {
        Image::from_fn(width, height, |x, y| {
            let (lx, ly) = (x as i64 - x0 as i64 - ox, y as i64 - y0 as i64 - oy);
            if (0..size as i64).contains(&lx) && (0..size as i64).contains(&ly) {
                // texture is attached to the square and moves with it
                (0.3 + 0.7 * foreground.at(lx as f64, ly as f64)) as f32
            } else {
                (0.6 * background.at(x as f64, y as f64)) as f32
            }
        })
    };
    MovingSquare {
        first: frame(0, 0),
        second: frame(dx, dy),
        square: BinaryMask::rect(width, height, x0, y0, size, size),
    }
}

/// Geometry of the bundled tagging fixture: a 128×128 frame with a 40×40
/// square at (40, 40) moving 4 px to the right.
pub const FIXTURE_SIZE: usize = 128;
pub const FIXTURE_SQUARE: (usize, usize, usize) = (40, 40, 40);
pub const FIXTURE_SHIFT: i64 = 4;
pub const FIXTURE_SEED: u64 = 7;

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json value");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// The tagging fixture's three proposals: the square itself, a square
/// shifted by half its width, and a square in the static background.
pub fn fixture_proposals() -> [(&'static str, BinaryMask); 3] {
    let (x0, y0, s) = FIXTURE_SQUARE;
    let n = FIXTURE_SIZE;
    [
        ("full", BinaryMask::rect(n, n, x0, y0, s, s)),
        ("half", BinaryMask::rect(n, n, x0 + s / 2, y0, s, s)),
        ("none", BinaryMask::rect(n, n, 96, 96, 24, 24)),
    ]
}

/// Writes the tagging fixture:
///
/// ```text
/// sequence/frame_000.png  sequence/frame_001.png
/// proposals/proposals.json  proposals/{full,half,none}.png
/// ground_truth.png
/// ```
pub fn write_tagging_fixture(dir: &Path) -> Result<()> {
    let (x0, y0, s) = FIXTURE_SQUARE;
    let scene = moving_square(
        FIXTURE_SIZE,
        FIXTURE_SIZE,
        x0,
        y0,
        s,
        FIXTURE_SHIFT,
        0,
        FIXTURE_SEED,
    );
    let seq = dir.join("sequence");
    let props = dir.join("proposals");
    create_dir(&seq)?;
    create_dir(&props)?;
    save_image(&scene.first, seq.join("frame_000.png"))?;
    save_image(&scene.second, seq.join("frame_001.png"))?;
    save_mask(&scene.square, dir.join("ground_truth.png"))?;
    let mut records = Vec::new();
    for (id, mask) in fixture_proposals() {
        let file = format!("{id}.png");
        save_mask(&mask, props.join(&file))?;
        records.push(json!({"id": id, "category": "object", "score": 0.9, "mask": file}));
    }
    write_json(&props.join("proposals.json"), &json!(records))
}

/// Writes a two-sequence evaluation dataset with `dataset.json`.
///
/// With the default policy (frame 0 excluded) sequence `alpha` scores
/// IoU 1.0 and 0.5 (mean 0.75), `beta` scores 0.25 on its only annotated
/// admitted frame, and the dataset mean is 0.5.
pub fn write_eval_fixture(dir: &Path) -> Result<()> {
    let n = 32;
    let masks: [(&str, BinaryMask); 8] = [
        ("alpha/gt.png", BinaryMask::rect(n, n, 8, 8, 16, 16)),
        ("alpha/pred_0.png", BinaryMask::empty(n, n)),
        ("alpha/pred_1.png", BinaryMask::rect(n, n, 8, 8, 16, 16)),
        ("alpha/pred_2.png", BinaryMask::rect(n, n, 8, 8, 16, 8)),
        ("beta/gt.png", BinaryMask::rect(n, n, 4, 4, 8, 8)),
        ("beta/pred_0.png", BinaryMask::rect(n, n, 4, 4, 8, 8)),
        ("beta/pred_1.png", BinaryMask::rect(n, n, 4, 4, 8, 2)),
        ("beta/pred_2.png", BinaryMask::rect(n, n, 20, 20, 4, 4)),
    ];
    create_dir(&dir.join("alpha"))?;
    create_dir(&dir.join("beta"))?;
    for (name, mask) in &masks {
        save_mask(mask, dir.join(name))?;
    }
    let manifest = json!({
        "sequences": [
            {
                "name": "alpha",
                "ground_truth": ["alpha/gt.png", "alpha/gt.png", "alpha/gt.png"],
                "predictions": ["alpha/pred_0.png", "alpha/pred_1.png", "alpha/pred_2.png"]
            },
            {
                "name": "beta",
                "ground_truth": ["beta/gt.png", "beta/gt.png", null],
                "predictions": ["beta/pred_0.png", "beta/pred_1.png", "beta/pred_2.png"]
            }
        ]
    });
    write_json(&dir.join("dataset.json"), &manifest)
}
