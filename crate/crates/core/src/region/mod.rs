//! Region-statistics velocity models.
//!
//! Each model turns an image and a partition into per-region penalty fields
//! `ξ_i`, defined at every pixel: low values mean the pixel fits region `i`
//! well. The extended velocity `ξ_ext = ξ_j − ξ_i` compares a pixel's own
//! region `i` with its nearest neighbouring region `j`.

mod bhattacharyya;
mod gmm;

pub use bhattacharyya::{
    bhattacharyya_coefficient, bhattacharyya_velocity, bhattacharyya_xi, region_histograms,
    RegionHistogram,
};
pub use gmm::{fit_mixture, fit_region_mixtures, gmm_velocity, gmm_xi, GaussianMixture, GmmFit};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{interface_voronoi, Grid, ImageGrid, InterfaceMap, LabelMap, ScalarField};

/// Velocity model selector: `pc`, `gmm:K` or `bhat`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionModelKind {
    PiecewiseConstant,
    Gmm { components: usize },
    Bhattacharyya,
}

impl FromStr for RegionModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "pc" => Ok(RegionModelKind::PiecewiseConstant),
            "bhat" => Ok(RegionModelKind::Bhattacharyya),
            _ => {
                let k = s
                    .strip_prefix("gmm:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "unknown model '{s}' (expected pc, gmm:K or bhat)"
                        ))
                    })?;
                Ok(RegionModelKind::Gmm { components: k })
            }
        }
    }
}

impl fmt::Display for RegionModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionModelKind::PiecewiseConstant => write!(f, "pc"),
            RegionModelKind::Gmm { components } => write!(f, "gmm:{components}"),
            RegionModelKind::Bhattacharyya => write!(f, "bhat"),
        }
    }
}

/// Per-region penalties plus the extended velocity.
#[derive(Clone, Debug)]
pub struct VelocityBundle {
    /// `ξ_i`, indexed by `label - 1`.
    pub xi: Vec<ScalarField>,
    pub xi_ext: ScalarField,
}

impl VelocityBundle {
    pub fn new(xi: Vec<ScalarField>, labels: &LabelMap) -> Result<Self> {
        let xi_ext = if labels.count() >= 2 {
            extended_velocity(&xi, labels, &interface_voronoi(labels)?)?
        } else {
            let (w, h) = labels.dims();
            Grid::new(w, h, 0.0)
        };
        Ok(VelocityBundle { xi, xi_ext })
    }
}

/// `ξ_ext(x) = ξ_j(x) − ξ_i(x)` with `i` the label of `x` and `j` the region
/// whose interface with `i` is nearest to `x`.
pub fn extended_velocity(
    xi: &[ScalarField],
    labels: &LabelMap,
    interfaces: &InterfaceMap,
) -> Result<ScalarField> {
    if xi.len() != labels.count() as usize {
        return Err(Error::InvalidParameter(format!(
            "expected {} velocity fields, got {}",
            labels.count(),
            xi.len()
        )));
    }
    let (w, h) = labels.dims();
    let mut out = Grid::new(w, h, 0.0);
    for (idx, v) in out.data_mut().iter_mut().enumerate() {
        let i = labels.label(idx);
        let j = interfaces.partner(i, idx);
        if j != 0 {
            *v = xi[j as usize - 1].data()[idx] - xi[i as usize - 1].data()[idx];
        }
    }
    Ok(out)
}

pub(crate) fn check_image_labels(image: &ImageGrid, labels: &LabelMap) -> Result<()> {
    if image.dims() != labels.dims() {
        return Err(Error::DimensionMismatch {
            expected: image.dims(),
            got: labels.dims(),
        });
    }
    Ok(())
}

/// Per-channel means of every region, indexed by `label - 1`.
pub fn region_means(image: &ImageGrid, labels: &LabelMap) -> Result<Vec<Vec<f64>>> {
    check_image_labels(image, labels)?;
    let m = image.channels();
    let n = labels.count() as usize;
    let mut sums = vec![vec![0.0; m]; n];
    let mut counts = vec![0usize; n];
    for idx in 0..image.pixel_count() {
        let r = labels.label(idx) as usize - 1;
        counts[r] += 1;
        for (s, v) in sums[r].iter_mut().zip(image.value(idx)) {
            *s += v;
        }
    }
    sums.iter_mut()
        .zip(&counts)
        .enumerate()
        .map(|(r, (s, &c))| {
            if c == 0 {
                return Err(Error::VanishedRegion(r as u32 + 1));
            }
            s.iter_mut().for_each(|v| *v /= c as f64);
            Ok(s.clone())
        })
        .collect()
}

/// `ξ_i(x) = ‖I(x) − c_i‖²` with `c_i` the mean of region `i`.
pub fn piecewise_constant_xi(image: &ImageGrid, labels: &LabelMap) -> Result<Vec<ScalarField>> {
    let means = region_means(image, labels)?;
    let (w, h) = image.dims();
    Ok(means
        .iter()
        .map(|c| {
            let data = (0..w * h)
                .map(|idx| {
                    image
                        .value(idx)
                        .iter()
                        .zip(c)
                        .map(|(v, m)| (v - m) * (v - m))
                        .sum()
                })
                .collect();
            Grid::from_vec(w, h, data).expect("dims preserved")
        })
        .collect())
}

pub fn piecewise_constant_velocity(image: &ImageGrid, labels: &LabelMap) -> Result<VelocityBundle> {
    VelocityBundle::new(piecewise_constant_xi(image, labels)?, labels)
}
