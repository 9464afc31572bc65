//! Fast marching for asymmetric quadratic metrics.
//!
//! Updates are semi-Lagrangian: the value at a pixel `y` is the cheapest way
//! to reach `y` from a point on a stencil simplex `[y + v_a, y + v_b]`, with
//! the distance along the simplex interpolated linearly and the final step
//! measured by the metric at `y`. An optional prescribed map `Φ` gates
//! relaxations: a pixel is only updated while its prescribed value exceeds
//! the distance being accepted.

mod stencil;

pub use stencil::Stencil;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::{Grid, Mask, Pixel, ScalarField};
use crate::metric::{MetricField, MetricSample, Vec2};

const GOLDEN_TOL: f64 = 1e-8;

/// Default Chebyshev radius of the directly initialized source neighbourhood.
pub const SOURCE_INIT_RADIUS: usize = 4;

/// Minimum over `t ∈ [0, 1]` of
/// `(1 − t) D_a + t D_b + F(−((1 − t) v_a + t v_b))`, where `v_a`, `v_b` are
/// the offsets from the updated pixel to the two simplex vertices.
pub fn local_update(va: Vec2, vb: Vec2, da: f64, db: f64, metric: &MetricSample) -> f64 {
    let cost = |t: f64| {
        let p = [-((1.0 - t) * va[0] + t * vb[0]), -((1.0 - t) * va[1] + t * vb[1])];
        (1.0 - t) * da + t * db + metric.eval(p)
    };
    match (da.is_finite(), db.is_finite()) {
        (false, false) => f64::INFINITY,
        (true, false) => da + metric.eval([-va[0], -va[1]]),
        (false, true) => db + metric.eval([-vb[0], -vb[1]]),
        (true, true) => {
            // the objective is convex in t
            const INV_PHI: f64 = 0.618_033_988_749_894_9;
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut c = hi - INV_PHI * (hi - lo);
            let mut d = lo + INV_PHI * (hi - lo);
            let (mut fc, mut fd) = (cost(c), cost(d));
            while hi - lo > GOLDEN_TOL {
                if fc <= fd {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - INV_PHI * (hi - lo);
                    fc = cost(c);
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + INV_PHI * (hi - lo);
                    fd = cost(d);
                }
            }
            let inner = cost(0.5 * (lo + hi));
            inner.min(fc).min(fd).min(cost(0.0)).min(cost(1.0))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Far,
    Trial,
    Accepted,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    key: f64,
    seq: u64,
    idx: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed so that BinaryHeap pops the smallest key, oldest first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Output of a single solve.
#[derive(Clone, Debug)]
pub struct FmmSolution {
    /// Distances, `+∞` where never reached.
    pub distance: ScalarField,
    /// Flat indices in acceptance order.
    pub order: Vec<usize>,
}

/// One fast-marching run.
#[derive(Clone, Copy, Debug)]
pub struct FmmProblem<'a> {
    pub sources: &'a [Pixel],
    pub metric: &'a MetricField,
    pub active: &'a Mask,
    pub prescribed: Option<&'a ScalarField>,
    pub stencil: &'a Stencil,
    /// Chebyshev radius around each source initialized by direct segments.
    pub init_radius: usize,
}

impl FmmProblem<'_> {
    pub fn solve(&self) -> Result<FmmSolution> {
        fmm_solve(self)
    }
}

pub fn fmm_solve(p: &FmmProblem) -> Result<FmmSolution> {
    if p.sources.is_empty() {
        return Err(Error::NoSources);
    }
    let (w, h) = p.active.dims();
    p.active.same_dims(p.metric.samples())?;
    if let Some(phi) = p.prescribed {
        p.active.same_dims(phi)?;
    }
    let active = p.active.data();
    let len = w * h;
    let mut dist = vec![f64::INFINITY; len];
    let mut status = vec![Status::Far; len];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for s in p.sources {
        if s.x >= w || s.y >= h {
            return Err(Error::InvalidParameter(format!(
                "source ({}, {}) outside the grid",
                s.x, s.y
            )));
        }
        let idx = s.y * w + s.x;
        if !active[idx] {
            return Err(Error::InvalidParameter(format!(
                "source ({}, {}) outside the active domain",
                s.x, s.y
            )));
        }
        if status[idx] == Status::Far {
            dist[idx] = 0.0;
            status[idx] = Status::Trial;
            heap.push(Entry { key: 0.0, seq, idx });
            seq += 1;
        }
    }

    // Resolve the distance cone around each source directly: straight
    // segments measured by the metric at the target pixel.
    let reach = p.init_radius as i64;
    for s in p.sources {
        let (sx, sy) = (s.x as i64, s.y as i64);
        for yy in (sy - reach).max(0)..=(sy + reach).min(h as i64 - 1) {
            for yx in (sx - reach).max(0)..=(sx + reach).min(w as i64 - 1) {
                let yi = yy as usize * w + yx as usize;
                if !active[yi] || dist[yi] == 0.0 {
                    continue;
                }
                let cand = p.metric.sample(yi).eval([(yx - sx) as f64, (yy - sy) as f64]);
                if let Some(phi) = p.prescribed {
                    if phi.data()[yi] <= 0.0 {
                        continue;
                    }
                }
                if cand < dist[yi] {
                    dist[yi] = cand;
                    status[yi] = Status::Trial;
                    heap.push(Entry { key: cand, seq, idx: yi });
                    seq += 1;
                }
            }
        }
    }

    let offsets = p.stencil.offsets();
    let k_len = offsets.len();
    let voffs: Vec<Vec2> = offsets.iter().map(|o| [o[0] as f64, o[1] as f64]).collect();
    let mut order = Vec::new();
    let mut last = 0.0f64;

    // value of an accepted neighbour, +∞ otherwise
    let accepted_at = |dist: &[f64], status: &[Status], x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            return f64::INFINITY;
        }
        let i = y as usize * w + x as usize;
        if status[i] == Status::Accepted {
            dist[i]
        } else {
            f64::INFINITY
        }
    };

    while let Some(Entry { key, idx, .. }) = heap.pop() {
        if status[idx] == Status::Accepted || key != dist[idx] {
            continue;
        }
        assert!(key >= last, "fast marching lost causality: {key} after {last}");
        last = key;
        status[idx] = Status::Accepted;
        order.push(idx);
        let (mx, my) = ((idx % w) as i64, (idx / w) as i64);

        for k in 0..k_len {
            let (yx, yy) = (mx - offsets[k][0], my - offsets[k][1]);
            if yx < 0 || yy < 0 || yx >= w as i64 || yy >= h as i64 {
                continue;
            }
            let yi = yy as usize * w + yx as usize;
            if status[yi] == Status::Accepted || !active[yi] {
                continue;
            }
            if let Some(phi) = p.prescribed {
                if phi.data()[yi] <= key {
                    continue;
                }
            }
            let metric = p.metric.sample(yi);
            let mut best = f64::INFINITY;
            for (a, b) in [((k + k_len - 1) % k_len, k), (k, (k + 1) % k_len)] {
                let da = accepted_at(&dist, &status, yx + offsets[a][0], yy + offsets[a][1]);
                let db = accepted_at(&dist, &status, yx + offsets[b][0], yy + offsets[b][1]);
                best = best.min(local_update(voffs[a], voffs[b], da, db, metric));
            }
            let cand = best.max(key);
            if cand < dist[yi] {
                dist[yi] = cand;
                status[yi] = Status::Trial;
                heap.push(Entry {
                    key: cand,
                    seq,
                    idx: yi,
                });
                seq += 1;
            }
        }
    }
    Ok(FmmSolution {
        distance: Grid::from_vec(w, h, dist)?,
        order,
    })
}

/// Distances from `sources` restricted to `active`, gated by `phi`.
pub fn fmm_prescribed(
    sources: &[Pixel],
    metric: &MetricField,
    active: &Mask,
    phi: &ScalarField,
    stencil: &Stencil,
) -> Result<ScalarField> {
    Ok(fmm_solve(&FmmProblem {
        sources,
        metric,
        active,
        prescribed: Some(phi),
        stencil,
        init_radius: SOURCE_INIT_RADIUS,
    })?
    .distance)
}

/// Distances from `sources` restricted to `active`, without gating.
pub fn fmm_unconstrained(
    sources: &[Pixel],
    metric: &MetricField,
    active: &Mask,
    stencil: &Stencil,
) -> Result<ScalarField> {
    Ok(fmm_solve(&FmmProblem {
        sources,
        metric,
        active,
        prescribed: None,
        stencil,
        init_radius: SOURCE_INIT_RADIUS,
    })?
    .distance)
}

/// Result of the successive front propagation.
#[derive(Clone, Debug)]
pub struct VoronoiDiagram {
    /// Pointwise minimum of all region distances.
    pub phi: ScalarField,
    /// Winning region per pixel, 0 where no front arrived.
    pub index: Grid<u32>,
}

/// Runs one gated solve per region, in order, starting from `Φ ≡ +∞`. After
/// run `i`, pixels where `D_i < Φ` are claimed by region `i` and
/// `Φ = min(Φ, D_i)`. Each run is restricted to its band plus its sources.
pub fn voronoi_from_fronts(
    sources: &[Vec<Pixel>],
    metrics: &[MetricField],
    bands: &[Mask],
    stencil: &Stencil,
) -> Result<VoronoiDiagram> {
    let n = sources.len();
    if n < 2 || metrics.len() != n || bands.len() != n {
        return Err(Error::InvalidParameter(format!(
            "need matching sources, metrics and bands for at least two regions, got {}/{}/{}",
            n,
            metrics.len(),
            bands.len()
        )));
    }
    let (w, h) = bands[0].dims();
    let mut phi = Grid::new(w, h, f64::INFINITY);
    let mut index = Grid::new(w, h, 0u32);
    for i in 0..n {
        if sources[i].is_empty() {
            return Err(Error::VanishedRegion(i as u32 + 1));
        }
        let mut active = bands[i].clone();
        for s in &sources[i] {
            active.set(s.x, s.y, true);
        }
        let d = fmm_prescribed(&sources[i], &metrics[i], &active, &phi, stencil)?;
        for ((p, l), &v) in phi
            .data_mut()
            .iter_mut()
            .zip(index.data_mut())
            .zip(d.data())
        {
            if v < *p {
                *p = v;
                *l = i as u32 + 1;
            }
        }
    }
    Ok(VoronoiDiagram { phi, index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Tensor2;

    fn unit_field(w: usize, h: usize) -> MetricField {
        MetricField::uniform(w, h, MetricSample::EUCLIDEAN)
    }

    #[test]
    fn simplex_update_examples() {
        let m = MetricSample::EUCLIDEAN;
        let v = local_update([-1.0, 0.0], [0.0, -1.0], 0.0, 0.0, &m);
        assert!((v - 0.5f64.sqrt()).abs() < 1e-8);
        assert_eq!(local_update([1.0, 0.0], [0.0, 1.0], 2.0, f64::INFINITY, &m), 3.0);
        assert_eq!(
            local_update([1.0, 0.0], [0.0, 1.0], f64::INFINITY, f64::INFINITY, &m),
            f64::INFINITY
        );
        let heavy = MetricSample { psi: 2.0, ..m };
        let v2 = local_update([-1.0, 0.0], [0.0, -1.0], 0.0, 0.0, &heavy);
        assert!((v2 - 2.0 * v).abs() < 1e-8);
    }

    #[test]
    fn axis_is_exact() {
        let m = unit_field(21, 21);
        let active = Mask::new(21, 21, true);
        let st = Stencil::ring(2).unwrap();
        let d = fmm_unconstrained(&[Pixel::new(10, 10)], &m, &active, &st).unwrap();
        assert_eq!(*d.get(15, 10), 5.0);
        assert_eq!(*d.get(10, 3), 7.0);
        for y in 0..21 {
            for x in 0..21 {
                let e = ((x as f64 - 10.0).powi(2) + (y as f64 - 10.0).powi(2)).sqrt();
                assert!(*d.get(x, y) >= e - 1e-9);
            }
        }
    }

    #[test]
    fn zero_prescription_blocks_everything() {
        let m = unit_field(9, 9);
        let active = Mask::new(9, 9, true);
        let st = Stencil::ring(1).unwrap();
        let src = [Pixel::new(4, 4), Pixel::new(1, 1)];
        let d = fmm_prescribed(&src, &m, &active, &Grid::new(9, 9, 0.0), &st).unwrap();
        for (i, &v) in d.data().iter().enumerate() {
            if i == 4 * 9 + 4 || i == 9 + 1 {
                assert_eq!(v, 0.0);
            } else {
                assert_eq!(v, f64::INFINITY);
            }
        }
    }

    #[test]
    fn empty_sources_error() {
        let m = unit_field(5, 5);
        let st = Stencil::ring(1).unwrap();
        assert_eq!(
            fmm_unconstrained(&[], &m, &Mask::new(5, 5, true), &st).unwrap_err(),
            Error::NoSources
        );
    }

    #[test]
    fn asymmetric_metric_prefers_rightward_travel() {
        let s = MetricSample::new(Tensor2::IDENTITY, [3.0, 0.0], 1.0).unwrap();
        let m = MetricField::uniform(41, 11, s);
        let st = Stencil::ring(2).unwrap();
        let d = fmm_unconstrained(&[Pixel::new(20, 5)], &m, &Mask::new(41, 11, true), &st).unwrap();
        for k in 1..=20 {
            assert!(d.get(20 + k, 5) < d.get(20 - k, 5));
            assert!((d.get(20 + k, 5) - k as f64).abs() < 1e-9);
            assert!((d.get(20 - k, 5) - k as f64 * 10f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn acceptance_order_is_causal() {
        let w = 30;
        let samples = Grid::from_fn(w, w, |x, y| {
            let t = Tensor2::from_eigen([0.8, 0.6], 1.0 + (x % 4) as f64, 1.0);
            MetricSample::new(t, [(y as f64 * 0.3).sin() * 4.0, 2.0], 1.0 + 0.1 * (y % 3) as f64)
                .unwrap()
        });
        let m = MetricField::new(samples, Mask::new(w, w, true)).unwrap();
        let st = Stencil::ring(3).unwrap();
        let sol = fmm_solve(&FmmProblem {
            sources: &[Pixel::new(3, 4), Pixel::new(20, 25)],
            metric: &m,
            active: &Mask::new(w, w, true),
            prescribed: None,
            stencil: &st,
            init_radius: SOURCE_INIT_RADIUS,
        })
        .unwrap();
        let vals: Vec<f64> = sol.order.iter().map(|&i| sol.distance.data()[i]).collect();
        assert!(vals.windows(2).all(|p| p[0] <= p[1]));
        assert_eq!(sol.order.len(), w * w);
    }

    #[test]
    fn infinite_prescription_matches_ungated() {
        let w = 25;
        let samples = Grid::from_fn(w, w, |x, y| {
            MetricSample::new(Tensor2::IDENTITY, [((x + y) % 5) as f64 - 2.0, 1.0], 1.0).unwrap()
        });
        let m = MetricField::new(samples, Mask::new(w, w, true)).unwrap();
        let active = Grid::from_fn(w, w, |x, y| (x + 2 * y) % 7 != 0);
        let st = Stencil::ring(2).unwrap();
        let src = [Pixel::new(12, 12)];
        let a = fmm_unconstrained(&src, &m, &active, &st).unwrap();
        let b = fmm_prescribed(&src, &m, &active, &Grid::new(w, w, f64::INFINITY), &st).unwrap();
        let bits = |g: &ScalarField| g.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn symmetric_sources_split_on_bisector() {
        let (w, h) = (31, 15);
        let m = unit_field(w, h);
        let band = Mask::new(w, h, true);
        let st = Stencil::ring(2).unwrap();
        let v = voronoi_from_fronts(
            &[vec![Pixel::new(5, 7)], vec![Pixel::new(25, 7)]],
            &[m.clone(), m],
            &[band.clone(), band],
            &st,
        )
        .unwrap();
        for y in 0..h {
            for x in 0..w {
                let l = *v.index.get(x, y);
                if x < 15 {
                    assert_eq!(l, 1);
                } else if x > 15 {
                    assert_eq!(l, 2);
                }
            }
        }
        // the bisector column is equidistant: the earlier run keeps it
        assert_eq!(*v.index.get(15, 7), 1);
    }

    #[test]
    fn slow_region_loses_ground() {
        let (w, h) = (31, 15);
        let slow = MetricField::uniform(w, h, MetricSample { psi: 10.0, ..MetricSample::EUCLIDEAN });
        let fast = unit_field(w, h);
        let band = Mask::new(w, h, true);
        let st = Stencil::ring(2).unwrap();
        let v = voronoi_from_fronts(
            &[vec![Pixel::new(5, 7)], vec![Pixel::new(25, 7)]],
            &[slow, fast],
            &[band.clone(), band],
            &st,
        )
        .unwrap();
        let twos = v.index.data().iter().filter(|&&l| l == 2).count();
        assert!(twos > w * h / 2);
        for y in 0..h {
            for x in 15..w {
                assert_eq!(*v.index.get(x, y), 2);
            }
        }
    }

    #[test]
    fn empty_source_set_is_vanished_region() {
        let m = unit_field(8, 8);
        let band = Mask::new(8, 8, true);
        let st = Stencil::ring(1).unwrap();
        let err = voronoi_from_fronts(
            &[vec![Pixel::new(1, 1)], vec![]],
            &[m.clone(), m],
            &[band.clone(), band],
            &st,
        )
        .unwrap_err();
        assert_eq!(err, Error::VanishedRegion(2));
    }
}
