use super::edt::depth_map;
use super::{Mask, Pixel, PointSet};
use crate::error::{Error, Result};

/// Greedy farthest point sampling inside `region`.
///
/// Each new point maximizes its Euclidean distance to the points already
/// chosen; ties go to the lexicographically smallest `(x, y)`. Without
/// `first`, sampling starts at the region pixel deepest inside the region.
pub fn farthest_point_sampling(region: &Mask, n: usize, first: Option<Pixel>) -> Result<PointSet> {
    let candidates = region.pixels();
    if n > candidates.len() || candidates.is_empty() {
        return Err(Error::NotEnoughPixels {
            requested: n,
            available: candidates.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let start = match first {
        Some(p) => {
            if p.x >= region.width() || p.y >= region.height() || !*region.at(p) {
                return Err(Error::InvalidParameter(format!(
                    "first sample ({}, {}) is not in the region",
                    p.x, p.y
                )));
            }
            p
        }
        None => deepest_pixel(region, &candidates),
    };

    let mut chosen = Vec::with_capacity(n);
    chosen.push(start);
    let mut mind: Vec<f64> = candidates.iter().map(|c| c.dist2(&start)).collect();
    while chosen.len() < n {
        let mut best = 0usize;
        for k in 1..candidates.len() {
            let (a, b) = (mind[k], mind[best]);
            if a > b || (a == b && candidates[k] < candidates[best]) {
                best = k;
            }
        }
        let p = candidates[best];
        chosen.push(p);
        for (m, c) in mind.iter_mut().zip(&candidates) {
            *m = m.min(c.dist2(&p));
        }
    }
    Ok(chosen)
}

fn deepest_pixel(region: &Mask, candidates: &[Pixel]) -> Pixel {
    let depth = depth_map(region);
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        let (a, b) = (*depth.at(c), *depth.at(best));
        if a > b || (a == b && c < best) {
            best = c;
        }
    }
    best
}
