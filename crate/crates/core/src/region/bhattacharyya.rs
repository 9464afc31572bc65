use super::{check_image_labels, VelocityBundle};
use crate::error::{Error, Result};
use crate::grid::{Grid, ImageGrid, LabelMap, ScalarField};

const PROB_FLOOR: f64 = 1e-12;

/// Kernel-smoothed per-channel histograms of one region.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionHistogram {
    pub area: usize,
    /// One normalized histogram per channel.
    pub channels: Vec<Vec<f64>>,
}

impl RegionHistogram {
    pub fn bins(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }
}

/// Normalized Gaussian weights spread by an intensity `v ∈ [0, 1]` over
/// `bins` uniform bins. Returns the first bin index and the weights.
fn kernel_weights(v: f64, bins: usize, bandwidth: f64, out: &mut Vec<f64>) -> usize {
    let u = v.clamp(0.0, 1.0) * bins as f64 - 0.5;
    let reach = (3.0 * bandwidth).ceil() as i64;
    let centre = u.round() as i64;
    let lo = (centre - reach).max(0);
    let hi = (centre + reach).min(bins as i64 - 1);
    out.clear();
    for b in lo..=hi {
        let d = (b as f64 - u) / bandwidth;
        out.push((-0.5 * d * d).exp());
    }
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|w| *w /= s);
    lo as usize
}

fn check_bins(bandwidth: f64, bins: usize) -> Result<()> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter(format!("bins must be >= 2, got {bins}")));
    }
    Ok(())
}

/// Histograms of every region, indexed by `label - 1`.
pub fn region_histograms(
    image: &ImageGrid,
    labels: &LabelMap,
    bandwidth: f64,
    bins: usize,
) -> Result<Vec<RegionHistogram>> {
    check_image_labels(image, labels)?;
    check_bins(bandwidth, bins)?;
    let m = image.channels();
    let n = labels.count() as usize;
    let mut hists = vec![
        RegionHistogram {
            area: 0,
            channels: vec![vec![0.0; bins]; m],
        };
        n
    ];
    let mut w = Vec::new();
    for idx in 0..image.pixel_count() {
        let r = labels.label(idx) as usize - 1;
        hists[r].area += 1;
        for (c, &v) in image.value(idx).iter().enumerate() {
            let lo = kernel_weights(v, bins, bandwidth, &mut w);
            for (k, wk) in w.iter().enumerate() {
                hists[r].channels[c][lo + k] += wk;
            }
        }
    }
    for (r, h) in hists.iter_mut().enumerate() {
        if h.area == 0 {
            return Err(Error::VanishedRegion(r as u32 + 1));
        }
        let a = h.area as f64;
        h.channels.iter_mut().flatten().for_each(|p| *p /= a);
    }
    Ok(hists)
}

/// Product over channels of `Σ_b √(P₁(b) P₂(b))`.
pub fn bhattacharyya_coefficient(a: &RegionHistogram, b: &RegionHistogram) -> f64 {
    a.channels
        .iter()
        .zip(&b.channels)
        .map(|(p, q)| p.iter().zip(q).map(|(x, y)| (x * y).sqrt()).sum::<f64>())
        .product()
}

/// Two-phase penalties: `ξ₁ = −½𝔅(1/|ℛ₁| − 1/|ℛ₂|) + ½𝒴` and `ξ₂ = −ξ₁`.
pub fn bhattacharyya_xi(
    image: &ImageGrid,
    labels: &LabelMap,
    bandwidth: f64,
    bins: usize,
) -> Result<Vec<ScalarField>> {
    if labels.count() != 2 {
        return Err(Error::TwoPhaseOnly);
    }
    let hists = region_histograms(image, labels, bandwidth, bins)?;
    let (h1, h2) = (&hists[0], &hists[1]);
    let coef = bhattacharyya_coefficient(h1, h2);
    let (a1, a2) = (h1.area as f64, h2.area as f64);
    let ratio = |num: &[f64], den: &[f64]| -> Vec<f64> {
        num.iter()
            .zip(den)
            .map(|(p, q)| (p.max(PROB_FLOOR) / q.max(PROB_FLOOR)).sqrt())
            .collect()
    };
    let r21: Vec<Vec<f64>> = h2.channels.iter().zip(&h1.channels).map(|(p, q)| ratio(p, q)).collect();
    let r12: Vec<Vec<f64>> = h1.channels.iter().zip(&h2.channels).map(|(p, q)| ratio(p, q)).collect();
    let area_term = -0.5 * coef * (1.0 / a1 - 1.0 / a2);

    let (w, h) = image.dims();
    let mut xi1 = Grid::new(w, h, 0.0);
    let mut kw = Vec::new();
    for (idx, out) in xi1.data_mut().iter_mut().enumerate() {
        let mut t1 = 1.0;
        let mut t2 = 1.0;
        for (c, &v) in image.value(idx).iter().enumerate() {
            let lo = kernel_weights(v, bins, bandwidth, &mut kw);
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for (k, wk) in kw.iter().enumerate() {
                s1 += wk * r21[c][lo + k];
                s2 += wk * r12[c][lo + k];
            }
            t1 *= s1;
            t2 *= s2;
        }
        *out = area_term + 0.5 * (t1 / a1 - t2 / a2);
    }
    let xi2 = xi1.map(|v| -v);
    Ok(vec![xi1, xi2])
}

pub fn bhattacharyya_velocity(
    image: &ImageGrid,
    labels: &LabelMap,
    bandwidth: f64,
    bins: usize,
) -> Result<VelocityBundle> {
    VelocityBundle::new(bhattacharyya_xi(image, labels, bandwidth, bins)?, labels)
}
