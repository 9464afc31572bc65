//! Scoring, the distance-thresholding baseline, synthetic data and the
//! multi-run benchmark protocol.

mod benchmark;
mod synthetic;

pub use benchmark::{
    benchmark, BenchmarkConfig, BenchmarkReport, Method, MethodSummary, RunRecord, SeedMode,
};
pub use synthetic::{make_synthetic, SyntheticShape, BACKGROUND_LEVEL, FOREGROUND_LEVEL};

use crate::error::{Error, Result};
use crate::grid::{Mask, ScalarField};

/// `|seg ∩ gt| / |seg ∪ gt|`, with two empty masks scoring 1.
pub fn jaccard(seg: &Mask, gt: &Mask) -> Result<f64> {
    seg.same_dims(gt)?;
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&a, &b) in seg.data().iter().zip(gt.data()) {
        inter += (a && b) as usize;
        union += (a || b) as usize;
    }
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

/// Pixels with `D ≤ T`.
pub fn threshold_segment(distance: &ScalarField, t: f64) -> Mask {
    distance.map(|&d| d <= t)
}

/// Outcome of the threshold sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdChoice {
    pub t: f64,
    /// Smallest threshold whose mask reaches 90% of the ground-truth area.
    pub t1: f64,
    /// Smallest threshold whose mask reaches 110% of the ground-truth area.
    pub t2: f64,
    pub jaccard: f64,
    pub mask: Mask,
}

/// Best-Jaccard threshold among the distinct finite distance values in
/// `[T1, T2]`. Ties go to the smallest threshold.
pub fn select_t_star(distance: &ScalarField, gt: &Mask) -> Result<ThresholdChoice> {
    distance.same_dims(gt)?;
    let g = gt.count();
    if g == 0 {
        return Err(Error::InvalidParameter("ground truth is empty".into()));
    }
    let mut order: Vec<usize> = (0..distance.len())
        .filter(|&i| distance.data()[i].is_finite())
        .collect();
    let lo_area = 0.9 * g as f64;
    let hi_area = 1.1 * g as f64;
    if (order.len() as f64) < hi_area {
        return Err(Error::UnderCoverage);
    }
    order.sort_by(|&a, &b| distance.data()[a].total_cmp(&distance.data()[b]));

    let mut area = 0usize;
    let mut inter = 0usize;
    let mut t1 = None;
    let mut best: Option<(f64, f64)> = None;
    let mut k = 0;
    while k < order.len() {
        let v = distance.data()[order[k]];
        while k < order.len() && distance.data()[order[k]] == v {
            area += 1;
            inter += gt.data()[order[k]] as usize;
            k += 1;
        }
        if t1.is_none() && area as f64 >= lo_area {
            t1 = Some(v);
        }
        if t1.is_some() {
            let j = inter as f64 / (area + g - inter) as f64;
            if best.is_none_or(|(_, bj)| j > bj) {
                best = Some((v, j));
            }
        }
        if area as f64 >= hi_area {
            let (t, j) = best.expect("t1 reached before t2");
            return Ok(ThresholdChoice {
                t,
                t1: t1.expect("set above"),
                t2: v,
                jaccard: j,
                mask: threshold_segment(distance, t),
            });
        }
    }
    Err(Error::UnderCoverage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn disk(size: usize, c: f64, r: f64) -> Mask {
        Grid::from_fn(size, size, |x, y| (x as f64 - c).powi(2) + (y as f64 - c).powi(2) <= r * r)
    }

    #[test]
    fn jaccard_examples() {
        let a = Grid::from_fn(20, 10, |x, _| x < 10);
        assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
        assert_eq!(jaccard(&a, &a.map(|b| !b)).unwrap(), 0.0);
        // |∩| = 50, |∪| = 150
        let b = Grid::from_fn(20, 10, |x, _| (5..15).contains(&x));
        let c = Grid::from_fn(20, 10, |x, y| (5..15).contains(&x) && y < 5 || x >= 15);
        let j = jaccard(&b, &c).unwrap();
        assert!((j - 1.0 / 3.0).abs() < 1e-15, "{j}");
        let e = Mask::new(4, 4, false);
        assert_eq!(jaccard(&e, &e).unwrap(), 1.0);
        assert!(jaccard(&e, &Mask::new(4, 5, false)).is_err());
    }

    #[test]
    fn threshold_examples() {
        let d = Grid::from_fn(21, 21, |x, y| ((x as f64 - 10.0).powi(2) + (y as f64 - 10.0).powi(2)).sqrt());
        assert_eq!(threshold_segment(&d, 0.0).count(), 1);
        assert_eq!(threshold_segment(&d, 5.0), disk(21, 10.0, 5.0));
        let mut partial = d.clone();
        partial.data_mut()[0] = f64::INFINITY;
        assert_eq!(threshold_segment(&partial, f64::INFINITY).count(), 21 * 21);
    }

    #[test]
    fn t_star_recovers_exact_level_set() {
        let d = Grid::from_fn(41, 41, |x, y| ((x as f64 - 20.0).powi(2) + (y as f64 - 20.0).powi(2)).sqrt());
        let gt = threshold_segment(&d, 8.0);
        let c = select_t_star(&d, &gt).unwrap();
        assert_eq!(c.jaccard, 1.0);
        assert_eq!(c.t, 8.0);
        assert!(c.t1 <= c.t && c.t <= c.t2);
    }

    #[test]
    fn t_star_on_disk_and_unimodal_sweep() {
        let gt = disk(41, 20.3, 9.5);
        let pts = gt.pixels();
        let cx = pts.iter().map(|p| p.x as f64).sum::<f64>() / pts.len() as f64;
        let cy = pts.iter().map(|p| p.y as f64).sum::<f64>() / pts.len() as f64;
        let d = Grid::from_fn(41, 41, |x, y| ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt());
        let c = select_t_star(&d, &gt).unwrap();
        assert!(c.jaccard >= 0.95 && (c.t - 9.5).abs() < 1.0, "{c:?}");
        let mut vals: Vec<f64> = d.data().to_vec();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        let js: Vec<f64> = vals
            .iter()
            .map(|&t| jaccard(&threshold_segment(&d, t), &gt).unwrap())
            .collect();
        let peak = js.iter().cloned().fold(0.0, f64::max);
        let p = js.iter().position(|&j| j == peak).unwrap();
        assert!(js[..=p].windows(2).all(|w| w[1] >= w[0]));
        assert!(js[p..].windows(2).all(|w| w[1] <= w[0]));
        let j1 = jaccard(&threshold_segment(&d, c.t1), &gt).unwrap();
        let j2 = jaccard(&threshold_segment(&d, c.t2), &gt).unwrap();
        assert!(c.jaccard >= j1 && c.jaccard >= j2);
    }

    #[test]
    fn t_star_under_coverage() {
        let gt = disk(21, 10.0, 6.0);
        let d = Grid::from_fn(21, 21, |x, y| if x < 8 && y < 8 { 1.0 } else { f64::INFINITY });
        assert_eq!(select_t_star(&d, &gt).unwrap_err(), Error::UnderCoverage);
    }
}
