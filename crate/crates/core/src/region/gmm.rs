use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_image_labels, VelocityBundle};
use crate::error::{Error, Result};
use crate::grid::{Grid, ImageGrid, LabelMap, ScalarField};

/// Eigenvalue floor applied to every covariance.
pub const COVARIANCE_FLOOR: f64 = 1e-4;
const DENSITY_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
struct Component {
    weight: f64,
    mean: Vec<f64>,
    /// Row-major `dim × dim`.
    cov: Vec<f64>,
    precision: Vec<f64>,
    log_norm: f64,
}

impl Component {
    fn new(weight: f64, mean: Vec<f64>, cov: &DMatrix<f64>) -> Self {
        let dim = mean.len();
        let eig = SymmetricEigen::new(cov.clone());
        let vals = eig.eigenvalues.map(|v| v.max(COVARIANCE_FLOOR));
        let vecs = eig.eigenvectors;
        let clamped = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
        let inv = &vecs * DMatrix::from_diagonal(&vals.map(|v| 1.0 / v)) * vecs.transpose();
        let log_det: f64 = vals.iter().map(|v| v.ln()).sum();
        let log_norm = -0.5 * (dim as f64 * (2.0 * std::f64::consts::PI).ln() + log_det);
        let flat = |m: &DMatrix<f64>| {
            let mut out = Vec::with_capacity(dim * dim);
            for r in 0..dim {
                for c in 0..dim {
                    out.push(m[(r, c)]);
                }
            }
            out
        };
        Component {
            weight,
            mean,
            cov: flat(&clamped),
            precision: flat(&inv),
            log_norm,
        }
    }

    #[inline]
    fn log_density(&self, x: &[f64]) -> f64 {
        let dim = x.len();
        let mut q = 0.0;
        for r in 0..dim {
            let dr = x[r] - self.mean[r];
            for c in 0..dim {
                q += dr * self.precision[r * dim + c] * (x[c] - self.mean[c]);
            }
        }
        self.log_norm - 0.5 * q
    }
}

/// Gaussian mixture over `dim`-channel intensities.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    dim: usize,
    components: Vec<Component>,
}

impl GaussianMixture {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    pub fn means(&self) -> Vec<Vec<f64>> {
        self.components.iter().map(|c| c.mean.clone()).collect()
    }

    /// Row-major covariance matrices.
    pub fn covariances(&self) -> Vec<Vec<f64>> {
        self.components.iter().map(|c| c.cov.clone()).collect()
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.log_density(x).exp())
            .sum()
    }

    fn log_joint(&self, x: &[f64], out: &mut [f64]) -> f64 {
        let mut hi = f64::NEG_INFINITY;
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = if c.weight > 0.0 {
                c.weight.ln() + c.log_density(x)
            } else {
                f64::NEG_INFINITY
            };
            hi = hi.max(*o);
        }
        let s: f64 = out.iter().map(|v| (v - hi).exp()).sum();
        hi + s.ln()
    }
}

fn m_step(data: &[f64], dim: usize, resp: &[f64], k: usize, previous: &[Component]) -> Vec<Component> {
    let n = data.len() / dim;
    (0..k)
        .map(|j| {
            let nk: f64 = (0..n).map(|i| resp[i * k + j]).sum();
            if nk <= 1e-12 * n as f64 {
                let mut c = previous[j].clone();
                c.weight = nk / n as f64;
                return c;
            }
            let mut mean = vec![0.0; dim];
            for i in 0..n {
                let r = resp[i * k + j];
                for d in 0..dim {
                    mean[d] += r * data[i * dim + d];
                }
            }
            mean.iter_mut().for_each(|v| *v /= nk);
            let mut cov = DMatrix::zeros(dim, dim);
            for i in 0..n {
                let r = resp[i * k + j];
                for a in 0..dim {
                    let da = data[i * dim + a] - mean[a];
                    for b in 0..dim {
                        cov[(a, b)] += r * da * (data[i * dim + b] - mean[b]);
                    }
                }
            }
            cov /= nk;
            Component::new(nk / n as f64, mean, &cov)
        })
        .collect()
}

fn kmeans_pp_init(data: &[f64], dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Component> {
    let n = data.len() / dim;
    let point = |i: usize| &data[i * dim..(i + 1) * dim];
    let d2 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();

    let mut centers = vec![rng.gen_range(0..n)];
    let mut nearest: Vec<f64> = (0..n).map(|i| d2(point(i), point(centers[0]))).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &v) in nearest.iter().enumerate() {
                if target < v {
                    pick = i;
                    break;
                }
                target -= v;
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centers.push(next);
        for (i, v) in nearest.iter_mut().enumerate() {
            *v = v.min(d2(point(i), point(next)));
        }
    }

    // hard assignment to the nearest center, then one maximization
    let mut resp = vec![0.0; n * k];
    for i in 0..n {
        let mut best = 0;
        let mut bd = f64::INFINITY;
        for (j, &c) in centers.iter().enumerate() {
            let d = d2(point(i), point(c));
            if d < bd {
                bd = d;
                best = j;
            }
        }
        resp[i * k + best] = 1.0;
    }
    let mut global = DMatrix::zeros(dim, dim);
    let mut gmean = vec![0.0; dim];
    for i in 0..n {
        for d in 0..dim {
            gmean[d] += data[i * dim + d] / n as f64;
        }
    }
    for i in 0..n {
        for a in 0..dim {
            for b in 0..dim {
                global[(a, b)] +=
                    (data[i * dim + a] - gmean[a]) * (data[i * dim + b] - gmean[b]) / n as f64;
            }
        }
    }
    let fallback: Vec<Component> = centers
        .iter()
        .map(|&c| Component::new(0.0, point(c).to_vec(), &global))
        .collect();
    m_step(data, dim, &resp, k, &fallback)
}

/// Fits a `k`-component mixture to `data` (`dim` interleaved channels) by
/// EM. Starts from `init` when given, otherwise from k-means++ seeding drawn
/// from `rng`. Returns the mixture and the data log-likelihood before the
/// first iteration and after each one.
pub fn fit_mixture(
    data: &[f64],
    dim: usize,
    k: usize,
    iters: usize,
    init: Option<&GaussianMixture>,
    rng: &mut ChaCha8Rng,
) -> Result<(GaussianMixture, Vec<f64>)> {
    if k == 0 || dim == 0 {
        return Err(Error::InvalidParameter("mixture needs k >= 1 and dim >= 1".into()));
    }
    let n = data.len() / dim;
    if n < k * (dim + 1) {
        return Err(Error::RegionTooSmall {
            region: 0,
            pixels: n,
            needed: k * (dim + 1),
        });
    }
    let mut mix = match init {
        Some(m) if m.dim == dim && m.len() == k => m.clone(),
        _ => GaussianMixture {
            dim,
            components: kmeans_pp_init(data, dim, k, rng),
        },
    };
    let mut history = Vec::with_capacity(iters + 1);
    let mut resp = vec![0.0; n * k];
    let mut scratch = vec![0.0; k];
    for it in 0..=iters {
        let mut ll = 0.0;
        for i in 0..n {
            let lse = mix.log_joint(&data[i * dim..(i + 1) * dim], &mut scratch);
            ll += lse;
            for j in 0..k {
                resp[i * k + j] = (scratch[j] - lse).exp();
            }
        }
        history.push(ll);
        if it == iters {
            break;
        }
        mix.components = m_step(data, dim, &resp, k, &mix.components);
    }
    Ok((mix, history))
}

/// Per-region mixtures and their EM log-likelihood traces.
#[derive(Clone, Debug)]
pub struct GmmFit {
    pub mixtures: Vec<GaussianMixture>,
    pub log_likelihood: Vec<Vec<f64>>,
}

/// Fits one mixture per region. `warm` supplies per-region starting points
/// (e.g. the previous evolution step); regions without one are seeded from
/// `seed`.
pub fn fit_region_mixtures(
    image: &ImageGrid,
    labels: &LabelMap,
    k: usize,
    iters: usize,
    seed: u64,
    warm: Option<&[GaussianMixture]>,
) -> Result<GmmFit> {
    check_image_labels(image, labels)?;
    let dim = image.channels();
    let n = labels.count() as usize;
    let mut per_region = vec![Vec::new(); n];
    for idx in 0..image.pixel_count() {
        per_region[labels.label(idx) as usize - 1].extend_from_slice(image.value(idx));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mixtures = Vec::with_capacity(n);
    let mut log_likelihood = Vec::with_capacity(n);
    for (r, data) in per_region.iter().enumerate() {
        let init = warm.and_then(|w| w.get(r));
        let (mix, hist) = fit_mixture(data, dim, k, iters, init, &mut rng).map_err(|e| match e {
            Error::RegionTooSmall { pixels, needed, .. } => Error::RegionTooSmall {
                region: r as u32 + 1,
                pixels,
                needed,
            },
            other => other,
        })?;
        mixtures.push(mix);
        log_likelihood.push(hist);
    }
    Ok(GmmFit {
        mixtures,
        log_likelihood,
    })
}

/// `ξ_i(x) = −log max(P_i(I(x)), 10⁻¹²)`.
pub fn gmm_xi(image: &ImageGrid, mixtures: &[GaussianMixture]) -> Vec<ScalarField> {
    let (w, h) = image.dims();
    mixtures
        .iter()
        .map(|mix| {
            let data = (0..w * h)
                .map(|idx| -mix.density(image.value(idx)).max(DENSITY_FLOOR).ln())
                .collect();
            Grid::from_vec(w, h, data).expect("dims preserved")
        })
        .collect()
}

pub fn gmm_velocity(
    image: &ImageGrid,
    labels: &LabelMap,
    k: usize,
    em_iters: usize,
    seed: u64,
) -> Result<VelocityBundle> {
    let fit = fit_region_mixtures(image, labels, k, em_iters, seed, None)?;
    VelocityBundle::new(gmm_xi(image, &fit.mixtures), labels)
}
