use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::grid::{Grid, ImageGrid, Mask};

pub const BACKGROUND_LEVEL: f64 = 0.25;
pub const FOREGROUND_LEVEL: f64 = 0.75;

/// Foreground shapes of the synthetic generator. Sizes scale with the
/// shorter image side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntheticShape {
    Disk,
    /// Ellipse with a narrow bar sticking out to the right.
    Appendage,
    /// Three overlapping disks.
    MultiLobe,
}

impl FromStr for SyntheticShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "disk" => Ok(SyntheticShape::Disk),
            "appendage" => Ok(SyntheticShape::Appendage),
            "multilobe" => Ok(SyntheticShape::MultiLobe),
            other => Err(Error::InvalidParameter(format!(
                "unknown synthetic shape '{other}' (expected disk, appendage or multilobe)"
            ))),
        }
    }
}

impl fmt::Display for SyntheticShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntheticShape::Disk => "disk",
            SyntheticShape::Appendage => "appendage",
            SyntheticShape::MultiLobe => "multilobe",
        })
    }
}

fn shape_mask(shape: SyntheticShape, w: usize, h: usize) -> Mask {
    let s = w.min(h) as f64;
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    match shape {
        SyntheticShape::Disk => {
            let r = 0.3 * s;
            Grid::from_fn(w, h, |x, y| {
                (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r
            })
        }
        SyntheticShape::Appendage => {
            let ex = 0.38 * w as f64;
            let (ax, ay) = (0.24 * s, 0.18 * s);
            let half = (0.08 * s).max(1.5);
            let bar_end = 0.9 * w as f64;
            Grid::from_fn(w, h, |x, y| {
                let (dx, dy) = (x as f64 - ex, y as f64 - cy);
                let in_ellipse = (dx / ax).powi(2) + (dy / ay).powi(2) <= 1.0;
                let in_bar = x as f64 >= ex && x as f64 <= bar_end && dy.abs() <= half;
                in_ellipse || in_bar
            })
        }
        SyntheticShape::MultiLobe => {
            let r = 0.17 * s;
            let off = 0.14 * s;
            let centres: Vec<(f64, f64)> = (0..3)
                .map(|k| {
                    let t = -std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::TAU / 3.0;
                    (cx + off * t.cos(), cy + off * t.sin())
                })
                .collect();
            Grid::from_fn(w, h, |x, y| {
                centres
                    .iter()
                    .any(|(px, py)| (x as f64 - px).powi(2) + (y as f64 - py).powi(2) <= r * r)
            })
        }
    }
}

/// Two-tone gray image of `shape` with additive Gaussian noise clipped to
/// `[0, 1]`, plus its exact foreground mask.
pub fn make_synthetic(
    shape: SyntheticShape,
    width: usize,
    height: usize,
    noise: f64,
    seed: u64,
) -> Result<(ImageGrid, Mask)> {
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise std must be >= 0, got {noise}")));
    }
    let gt = shape_mask(shape, width, height);
    let clean = gt.map(|&b| if b { FOREGROUND_LEVEL } else { BACKGROUND_LEVEL });
    let field = if noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Normal::new(0.0, noise).expect("finite std");
        let mut noisy = clean;
        for v in noisy.data_mut() {
            *v = (*v + dist.sample(&mut rng)).clamp(0.0, 1.0);
        }
        noisy
    } else {
        clean
    };
    Ok((ImageGrid::from_gray(&field)?, gt))
}
