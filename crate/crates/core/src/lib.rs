//! Asymmetric dual-front active contours.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: rasters, label maps, distance transforms, contour bands.
//! * [`metric`]: asymmetric quadratic metrics and their data-driven assembly.
//! * [`eikonal`]: fast marching with prescribed distances and Voronoi labeling.
//! * [`region`]: region-statistics velocity models.
//! * [`dualfront`]: the contour evolution engine.
//! * [`eval`]: scoring, synthetic data and the benchmark protocol.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod grid;
pub mod eikonal;
pub mod metric;
pub mod region;
pub mod dualfront;
pub mod eval;

pub use error::{Error, Result};
pub use grid::{Grid, ImageGrid, LabelMap, Mask, Pixel, PointSet, ScalarField};
