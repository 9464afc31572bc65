//! Contour geometry on label maps.
//!
//! The contour Γ lives between 4-adjacent pixels with different labels; on
//! the grid it is represented by the pixels on both sides of such pairs, so
//! those pixels sit at distance 0 from Γ.

use super::edt::squared_distance_map;
use super::{Grid, LabelMap, Mask, PointSet, ScalarField};
use crate::error::{Error, Result};

/// Pixels having a 4-neighbour with a different label (Γ).
pub fn boundary_mask(labels: &LabelMap) -> Mask {
    let g = labels.grid();
    let mut m = Mask::new(g.width(), g.height(), false);
    for idx in 0..g.len() {
        let l = g.data()[idx];
        if g.neighbors4(idx).any(|n| g.data()[n] != l) {
            m.data_mut()[idx] = true;
        }
    }
    m
}

/// Pixels on either side of an interface involving `region` (Γ_i).
pub fn region_boundary_mask(labels: &LabelMap, region: u32) -> Mask {
    let g = labels.grid();
    let mut m = Mask::new(g.width(), g.height(), false);
    for idx in 0..g.len() {
        let inside = g.data()[idx] == region;
        if g.neighbors4(idx).any(|n| (g.data()[n] == region) != inside) {
            m.data_mut()[idx] = true;
        }
    }
    m
}

fn distance_or_inf(seeds: &Mask) -> ScalarField {
    let mut d = squared_distance_map(seeds);
    d.data_mut().iter_mut().for_each(|v| *v = v.sqrt());
    d
}

fn check_region(labels: &LabelMap, region: u32) -> Result<()> {
    if region == 0 || region > labels.count() || !labels.data().contains(&region) {
        return Err(Error::VanishedRegion(region));
    }
    Ok(())
}

/// Offset band from a precomputed `ℰ(·, Γ_i)` map.
fn offset_band_from(labels: &LabelMap, region: u32, dist: &ScalarField, ell: f64) -> PointSet {
    let lo = ell - 1.0;
    let band: PointSet = (0..dist.len())
        .filter(|&i| labels.label(i) == region)
        .filter(|&i| {
            let d = dist.data()[i];
            d >= lo && d <= ell
        })
        .map(|i| dist.pixel(i))
        .collect();
    if !band.is_empty() {
        return band;
    }
    // Region thinner than ℓ: seed from its deepest pixels instead.
    let deepest = (0..dist.len())
        .filter(|&i| labels.label(i) == region)
        .map(|i| dist.data()[i])
        .fold(f64::NEG_INFINITY, f64::max);
    (0..dist.len())
        .filter(|&i| labels.label(i) == region && dist.data()[i] == deepest)
        .map(|i| dist.pixel(i))
        .collect()
}

/// Discrete offset line `𝒞_i^ℓ`: pixels of region `i` whose distance to Γ_i
/// lies in `[ℓ - 1, ℓ]`, or the region's deepest pixels when that band is
/// empty.
pub fn extract_offset_band(labels: &LabelMap, region: u32, ell: f64) -> Result<PointSet> {
    if !(ell > 0.0) {
        return Err(Error::InvalidParameter(format!("band width {ell} must be > 0")));
    }
    check_region(labels, region)?;
    let boundary = region_boundary_mask(labels, region);
    let dist = distance_or_inf(&boundary);
    Ok(offset_band_from(labels, region, &dist, ell))
}

/// Tubular neighbourhoods of the contour.
#[derive(Clone, Debug)]
pub struct Narrowband {
    /// `U_Γ = {x : ℰ_Γ(x) < ℓ}`
    pub contour: Mask,
    /// `U_i = {x ∈ U_Γ : ℰ(x, Γ_i) < ℓ}`, indexed by `label - 1`.
    pub regions: Vec<Mask>,
}

pub fn build_narrowband(labels: &LabelMap, ell: f64) -> Result<Narrowband> {
    if !(ell > 0.0) {
        return Err(Error::InvalidParameter(format!("band width {ell} must be > 0")));
    }
    let geom = ContourGeometry::new(labels, ell)?;
    Ok(Narrowband {
        contour: geom.band,
        regions: geom.region_bands,
    })
}

/// Nearest-interface structure: for every pixel, the interface `Γ_{i,j}`
/// closest in Euclidean distance, plus for every region `i` the partner `j`
/// whose interface with `i` is closest.
#[derive(Clone, Debug)]
pub struct InterfaceMap {
    regions: u32,
    pairs: Vec<(u32, u32)>,
    nearest: Grid<u32>,
    partners: Vec<Grid<u32>>,
}

impl InterfaceMap {
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// Nearest interface pair `(i, j)` with `i < j` at flat index `idx`.
    pub fn pair_at(&self, idx: usize) -> (u32, u32) {
        self.pairs[self.nearest.data()[idx] as usize]
    }

    /// Region whose interface with `region` is nearest to `idx`; 0 when
    /// `region` has no neighbours at all.
    #[inline]
    pub fn partner(&self, region: u32, idx: usize) -> u32 {
        self.partners[region as usize - 1].data()[idx]
    }

    pub fn region_count(&self) -> u32 {
        self.regions
    }
}

/// Per-pixel nearest interface pair; ties go to the lexicographically
/// smallest pair.
pub fn interface_voronoi(labels: &LabelMap) -> Result<InterfaceMap> {
    let n = labels.count();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "interface map needs at least two regions".into(),
        ));
    }
    let g = labels.grid();
    let (w, h) = g.dims();

    let mut adjacency = vec![false; (n as usize + 1) * (n as usize + 1)];
    for idx in 0..g.len() {
        let a = g.data()[idx];
        for nb in g.neighbors4(idx) {
            let b = g.data()[nb];
            if a != b {
                adjacency[a.min(b) as usize * (n as usize + 1) + a.max(b) as usize] = true;
            }
        }
    }
    let pairs: Vec<(u32, u32)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| adjacency[i as usize * (n as usize + 1) + j as usize])
        .collect();

    let mut nearest = Grid::new(w, h, 0u32);
    let mut partners: Vec<Grid<u32>> = (0..n).map(|_| Grid::new(w, h, 0u32)).collect();

    if pairs.len() == 1 {
        let (i, j) = pairs[0];
        partners[i as usize - 1].fill(j);
        partners[j as usize - 1].fill(i);
        return Ok(InterfaceMap {
            regions: n,
            pairs,
            nearest,
            partners,
        });
    }

    let mut best = Grid::new(w, h, f64::INFINITY);
    let mut region_best: Vec<Grid<f64>> =
        (0..n).map(|_| Grid::new(w, h, f64::INFINITY)).collect();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let mut seeds = Mask::new(w, h, false);
        for idx in 0..g.len() {
            let a = g.data()[idx];
            let other = if a == i {
                j
            } else if a == j {
                i
            } else {
                continue;
            };
            if g.neighbors4(idx).any(|nb| g.data()[nb] == other) {
                seeds.data_mut()[idx] = true;
            }
        }
        let d = squared_distance_map(&seeds);
        for idx in 0..g.len() {
            let v = d.data()[idx];
            if v < best.data()[idx] {
                best.data_mut()[idx] = v;
                nearest.data_mut()[idx] = k as u32;
            }
            for (r, other) in [(i, j), (j, i)] {
                let rb = &mut region_best[r as usize - 1];
                if v < rb.data()[idx] {
                    rb.data_mut()[idx] = v;
                    partners[r as usize - 1].data_mut()[idx] = other;
                }
            }
        }
    }
    Ok(InterfaceMap {
        regions: n,
        pairs,
        nearest,
        partners,
    })
}

/// Everything one evolution step needs to know about the current contour.
#[derive(Clone, Debug)]
pub struct ContourGeometry {
    pub band_width: f64,
    /// Γ pixels.
    pub boundary: Mask,
    /// `ℰ_Γ`.
    pub contour_distance: ScalarField,
    /// `ℰ(·, Γ_i)` per region.
    pub region_distance: Vec<ScalarField>,
    /// `U_Γ`.
    pub band: Mask,
    /// `U_i` per region.
    pub region_bands: Vec<Mask>,
    pub interfaces: InterfaceMap,
}

impl ContourGeometry {
    pub fn new(labels: &LabelMap, ell: f64) -> Result<Self> {
        let (w, h) = labels.dims();
        let n = labels.count();
        let boundary = boundary_mask(labels);
        let contour_distance = distance_or_inf(&boundary);
        let band = contour_distance.map(|&d| d < ell);
        let mut region_distance = Vec::with_capacity(n as usize);
        let mut region_bands = Vec::with_capacity(n as usize);
        for i in 1..=n {
            let d = if n == 2 {
                // both regions share the single interface
                contour_distance.clone()
            } else {
                distance_or_inf(&region_boundary_mask(labels, i))
            };
            let u = Grid::from_fn(w, h, |x, y| *band.get(x, y) && *d.get(x, y) < ell);
            region_distance.push(d);
            region_bands.push(u);
        }
        let interfaces = if n >= 2 {
            interface_voronoi(labels)?
        } else {
            InterfaceMap {
                regions: n,
                pairs: Vec::new(),
                nearest: Grid::new(w, h, 0),
                partners: (0..n).map(|_| Grid::new(w, h, 0)).collect(),
            }
        };
        Ok(ContourGeometry {
            band_width: ell,
            boundary,
            contour_distance,
            region_distance,
            band,
            region_bands,
            interfaces,
        })
    }

    pub fn offset_band(&self, labels: &LabelMap, region: u32) -> Result<PointSet> {
        check_region(labels, region)?;
        Ok(offset_band_from(
            labels,
            region,
            &self.region_distance[region as usize - 1],
            self.band_width,
        ))
    }
}
