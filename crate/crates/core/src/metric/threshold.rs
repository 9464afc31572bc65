use super::{edge_features, gradient, norm, MetricField, MetricSample, Tensor2};
use crate::error::{Error, Result};
use crate::grid::{gaussian_convolve, Grid, ImageGrid, Mask};

/// Parameters of the edge-driven metric used by distance thresholding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdParams {
    pub sigma: f64,
    pub beta: f64,
    pub rho: f64,
    pub q: f64,
    pub eps: f64,
    pub eps0: f64,
    pub iota: f64,
    pub t_edge: f64,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        ThresholdParams {
            sigma: 2.0,
            beta: 2.0,
            rho: 8.0,
            q: 2.0,
            eps: 1.0,
            eps0: 0.02,
            iota: 1e-6,
            t_edge: 0.2,
        }
    }
}

impl ThresholdParams {
    /// `(τ1, τ2)` for a thresholded edge strength.
    pub fn taus(&self, eta_th: f64) -> (f64, f64) {
        let t2 = ((self.beta * eta_th).exp() - self.eps).max(self.eps0);
        let t1 = ((self.rho * eta_th).exp() - self.eps).max(self.eps0) * t2;
        (t1, t2)
    }
}

/// Asymmetric metric that is cheap in flat areas and expensive when
/// travelling down the edge-strength gradient, i.e. when leaving an edge.
pub fn thresholding_metric(image: &ImageGrid, params: &ThresholdParams) -> Result<MetricField> {
    if !(params.t_edge > 0.0 && params.t_edge < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "edge threshold {} must lie in (0, 1)",
            params.t_edge
        )));
    }
    let edge = edge_features(image, params.sigma, params.beta, params.rho, params.q)?;
    let pull = gradient(&gaussian_convolve(&edge.eta, params.sigma));
    let (w, h) = image.dims();
    let samples = Grid::from_fn(w, h, |x, y| {
        let eta = *edge.eta.get(x, y);
        let eta_th = if eta >= params.t_edge { eta } else { 0.0 };
        let (t1, t2) = params.taus(eta_th);
        let e1 = edge.tensor.get(x, y).dominant_eigenvector();
        let g = *pull.get(x, y);
        let s = t2 / (norm(g) + params.iota);
        MetricSample {
            tensor: Tensor2::from_eigen(e1, t1, t2),
            omega: [s * g[0], s * g[1]],
            psi: 1.0,
        }
    });
    MetricField::new(samples, Mask::new(w, h, true))
}
