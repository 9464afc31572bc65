//! Raster primitives shared by every other module.
//!
//! All grids are stored row-major with unit spacing. Pixel `(x, y)` lives at
//! index `y * width + x`.

mod band;
mod edt;
mod fps;
mod gaussian;

pub use band::{
    boundary_mask, build_narrowband, extract_offset_band, interface_voronoi, region_boundary_mask,
    ContourGeometry, InterfaceMap, Narrowband,
};
pub use edt::{
    depth_map, euclidean_distance_from_points, euclidean_distance_map, signed_distance,
    squared_distance_map,
};
pub use fps::farthest_point_sampling;
pub use gaussian::{gaussian_convolve, gaussian_kernel};

use crate::error::{Error, Result};

/// Integer pixel coordinate. Ordering is lexicographic on `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pixel {
    pub x: usize,
    pub y: usize,
}

impl Pixel {
    pub fn new(x: usize, y: usize) -> Self {
        Pixel { x, y }
    }

    pub fn dist2(&self, other: &Pixel) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        dx * dx + dy * dy
    }
}

/// Ordered list of distinct in-grid pixels.
pub type PointSet = Vec<Pixel>;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

pub type ScalarField = Grid<f64>;
pub type Mask = Grid<bool>;

impl<T: Clone> Grid<T> {
    pub fn new(width: usize, height: usize, fill: T) -> Self {
        Grid {
            width,
            height,
            data: vec![fill; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "grid of {width}x{height} needs {} values, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Grid {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Grid {
            width,
            height,
            data,
        }
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn fill(&mut self, value: T) {
        self.data.iter_mut().for_each(|v| *v = value.clone());
    }
}

impl<T> Grid<T> {
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn pixel(&self, idx: usize) -> Pixel {
        Pixel {
            x: idx % self.width,
            y: idx / self.width,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.data[y * self.width + x]
    }

    #[inline]
    pub fn at(&self, p: Pixel) -> &T {
        &self.data[p.y * self.width + p.x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        let w = self.width;
        self.data[y * w + x] = value;
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn same_dims<U>(&self, other: &Grid<U>) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                got: other.dims(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    /// Indices of the 4-neighbours of `idx` that lie inside the grid.
    #[inline]
    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> {
        let (w, h) = (self.width, self.height);
        let (x, y) = (idx % w, idx / w);
        let left = (x > 0).then(|| idx - 1);
        let right = (x + 1 < w).then(|| idx + 1);
        let up = (y > 0).then(|| idx - w);
        let down = (y + 1 < h).then(|| idx + w);
        [left, right, up, down].into_iter().flatten()
    }
}

impl Mask {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn pixels(&self) -> PointSet {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.pixel(i))
            .collect()
    }

    pub fn from_points(width: usize, height: usize, points: &[Pixel]) -> Self {
        let mut m = Mask::new(width, height, false);
        for p in points {
            m.set(p.x, p.y, true);
        }
        m
    }
}

impl ScalarField {
    pub fn max_finite(&self) -> Option<f64> {
        self.data
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

/// A W×H raster of intensities in `[0, 1]` with one (gray) or three (RGB)
/// interleaved channels.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageGrid {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if width < 3 || height < 3 {
            return Err(Error::InvalidImage(format!(
                "image must be at least 3x3, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "expected 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "expected {} samples, got {}",
                width * height * channels,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidImage(format!(
                "intensity {v} outside [0, 1]"
            )));
        }
        Ok(ImageGrid {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn from_gray(field: &ScalarField) -> Result<Self> {
        ImageGrid::new(field.width(), field.height(), 1, field.data().to_vec())
    }

    pub fn constant(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        ImageGrid::new(
            width,
            height,
            channels,
            vec![value; width * height * channels],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Feature vector of the pixel at flat index `idx`.
    #[inline]
    pub fn value(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.channels..(idx + 1) * self.channels]
    }

    pub fn channel(&self, m: usize) -> ScalarField {
        let c = self.channels;
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().skip(m).step_by(c).copied().collect(),
        }
    }
}

/// Total assignment of pixels to regions `1..=count`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelMap {
    labels: Grid<u32>,
    count: u32,
}

impl LabelMap {
    /// Builds a label map; every label in `1..=max` must occur.
    pub fn new(labels: Grid<u32>) -> Result<Self> {
        let count = labels.data().iter().copied().max().unwrap_or(0);
        if labels.data().contains(&0) {
            return Err(Error::InvalidLabels("label 0 is not a region".into()));
        }
        let mut seen = vec![false; count as usize];
        for &l in labels.data() {
            seen[l as usize - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidLabels(format!(
                "region {} has no pixels",
                missing + 1
            )));
        }
        Ok(LabelMap { labels, count })
    }

    pub fn from_vec(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        LabelMap::new(Grid::from_vec(width, height, labels)?)
    }

    /// Two-region map: `true` pixels become region 2, the rest region 1.
    pub fn from_mask(mask: &Mask) -> Result<Self> {
        LabelMap::new(mask.map(|&b| if b { 2 } else { 1 }))
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn width(&self) -> usize {
        self.labels.width()
    }

    pub fn height(&self) -> usize {
        self.labels.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.labels.dims()
    }

    pub fn grid(&self) -> &Grid<u32> {
        &self.labels
    }

    pub fn data(&self) -> &[u32] {
        self.labels.data()
    }

    #[inline]
    pub fn label(&self, idx: usize) -> u32 {
        self.labels.data()[idx]
    }

    pub fn region_mask(&self, region: u32) -> Mask {
        self.labels.map(|&l| l == region)
    }

    /// Pixel count per region, indexed by `label - 1`.
    pub fn areas(&self) -> Vec<usize> {
        let mut areas = vec![0; self.count as usize];
        for &l in self.labels.data() {
            areas[l as usize - 1] += 1;
        }
        areas
    }

    /// Drops empty labels from a raw assignment and renumbers the survivors
    /// in order. Returns the compacted map and, for each new label, the old
    /// label it came from.
    pub fn compact(raw: Grid<u32>, count: u32) -> Result<(LabelMap, Vec<u32>)> {
        let mut present = vec![false; count as usize + 1];
        for &l in raw.data() {
            if l == 0 || l > count {
                return Err(Error::InvalidLabels(format!("label {l} out of range")));
            }
            present[l as usize] = true;
        }
        let mut remap = vec![0u32; count as usize + 1];
        let mut survivors = Vec::new();
        for old in 1..=count {
            if present[old as usize] {
                survivors.push(old);
                remap[old as usize] = survivors.len() as u32;
            }
        }
        let labels = raw.map(|&l| remap[l as usize]);
        Ok((
            LabelMap {
                labels,
                count: survivors.len() as u32,
            },
            survivors,
        ))
    }
}
