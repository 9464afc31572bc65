//! Exact Euclidean distance transform (Felzenszwalb & Huttenlocher lower
//! envelope of parabolas, applied along columns then rows).

use super::{Grid, Mask, Pixel, ScalarField};
use crate::error::{Error, Result};

/// One-dimensional squared distance transform of a sampled function `f`,
/// where `f[q] = ∞` marks positions that are not seeds.
fn transform_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let Some(first) = f.iter().position(|x| x.is_finite()) else {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    };
    let mut k = 0usize;
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        let fq = f[q] + (q * q) as f64;
        loop {
            let p = v[k];
            let s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                // z[0] is -inf so this never underflows
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Squared Euclidean distance from every pixel to the nearest `true` pixel of
/// `seeds`. Pixels are `+∞` when the mask is empty.
pub fn squared_distance_map(seeds: &Mask) -> ScalarField {
    let (w, h) = seeds.dims();
    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    let mut grid: Vec<f64> = seeds
        .data()
        .iter()
        .map(|&s| if s { 0.0 } else { f64::INFINITY })
        .collect();

    for x in 0..w {
        for y in 0..h {
            f[y] = grid[y * w + x];
        }
        transform_1d(&f[..h], &mut out[..h], &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = out[y];
        }
    }
    for y in 0..h {
        let row = &mut grid[y * w..(y + 1) * w];
        f[..w].copy_from_slice(row);
        transform_1d(&f[..w], &mut out[..w], &mut v, &mut z);
        row.copy_from_slice(&out[..w]);
    }
    Grid::from_vec(w, h, grid).expect("dims preserved")
}

/// Exact Euclidean distance map `ℰ(x; S)` to a non-empty seed mask.
pub fn euclidean_distance_map(seeds: &Mask) -> Result<ScalarField> {
    if !seeds.data().iter().any(|&s| s) {
        return Err(Error::NoSources);
    }
    let mut d = squared_distance_map(seeds);
    d.data_mut().iter_mut().for_each(|v| *v = v.sqrt());
    Ok(d)
}

pub fn euclidean_distance_from_points(
    points: &[Pixel],
    width: usize,
    height: usize,
) -> Result<ScalarField> {
    euclidean_distance_map(&Mask::from_points(width, height, points))
}

/// Signed distance to a region: positive outside, negative inside, with the
/// magnitude measured to the nearest pixel on the other side.
pub fn signed_distance(region: &Mask) -> ScalarField {
    let outside = squared_distance_map(region);
    let complement = region.map(|&b| !b);
    let inside = squared_distance_map(&complement);
    let data = outside
        .data()
        .iter()
        .zip(inside.data())
        .map(|(&o, &i)| {
            if o > 0.0 {
                o.sqrt()
            } else if i.is_finite() {
                -i.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Grid::from_vec(region.width(), region.height(), data).expect("dims preserved")
}

/// Distance from each pixel of `region` to the nearest pixel outside it,
/// treating everything beyond the image frame as outside. Zero off-region.
pub fn depth_map(region: &Mask) -> ScalarField {
    let (w, h) = region.dims();
    let padded = Grid::from_fn(w + 2, h + 2, |x, y| {
        x == 0 || y == 0 || x == w + 1 || y == h + 1 || !*region.get(x - 1, y - 1)
    });
    let d = squared_distance_map(&padded);
    Grid::from_fn(w, h, |x, y| {
        if *region.get(x, y) {
            d.get(x + 1, y + 1).sqrt()
        } else {
            0.0
        }
    })
}
