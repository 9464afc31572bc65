//! Asymmetric quadratic metrics
//! `F(u) = ψ √(⟨u, M u⟩ + max(−⟨u, ω⟩, 0)²)` and their construction from
//! image data and the current contour.

mod edge;
mod motion;
mod threshold;

pub use edge::{edge_features, gradient, EdgeFeatures};
pub use motion::{
    assemble_metric, motion_vector_field, motion_vector_field_with, smooth_vectors, speed_weight,
    speed_weight_with,
};
pub use threshold::{thresholding_metric, ThresholdParams};

use crate::error::{Error, Result};
use crate::grid::{Grid, Mask};

pub type Vec2 = [f64; 2];

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

/// Symmetric 2×2 matrix `[[m11, m12], [m12, m22]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor2 {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl Tensor2 {
    pub const IDENTITY: Tensor2 = Tensor2 {
        m11: 1.0,
        m12: 0.0,
        m22: 1.0,
    };
    pub const ZERO: Tensor2 = Tensor2 {
        m11: 0.0,
        m12: 0.0,
        m22: 0.0,
    };

    pub fn new(m11: f64, m12: f64, m22: f64) -> Self {
        Tensor2 { m11, m12, m22 }
    }

    pub fn scaled_identity(s: f64) -> Self {
        Tensor2::new(s, 0.0, s)
    }

    /// `v vᵀ`
    pub fn outer(v: Vec2) -> Self {
        Tensor2::new(v[0] * v[0], v[0] * v[1], v[1] * v[1])
    }

    /// `λ1 e eᵀ + λ2 e⊥ e⊥ᵀ` for a unit vector `e`.
    pub fn from_eigen(e: Vec2, l1: f64, l2: f64) -> Self {
        let (c, s) = (e[0], e[1]);
        Tensor2::new(
            l1 * c * c + l2 * s * s,
            (l1 - l2) * c * s,
            l1 * s * s + l2 * c * c,
        )
    }

    #[inline]
    pub fn quad(&self, u: Vec2) -> f64 {
        self.m11 * u[0] * u[0] + 2.0 * self.m12 * u[0] * u[1] + self.m22 * u[1] * u[1]
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    pub fn is_spd(&self) -> bool {
        self.m11 > 0.0 && self.det() > 0.0
    }

    /// Eigenvalues `(λmax, λmin)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.m11 + self.m22);
        let r = (0.5 * (self.m11 - self.m22)).hypot(self.m12);
        (mean + r, mean - r)
    }

    /// Unit eigenvector of the largest eigenvalue. For a multiple of the
    /// identity this is `(1, 0)`.
    pub fn dominant_eigenvector(&self) -> Vec2 {
        let theta = 0.5 * (2.0 * self.m12).atan2(self.m11 - self.m22);
        [theta.cos(), theta.sin()]
    }
}

/// One metric sample: tensor, asymmetric vector and scalar weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSample {
    pub tensor: Tensor2,
    pub omega: Vec2,
    pub psi: f64,
}

impl Default for MetricSample {
    fn default() -> Self {
        MetricSample::EUCLIDEAN
    }
}

impl MetricSample {
    pub const EUCLIDEAN: MetricSample = MetricSample {
        tensor: Tensor2::IDENTITY,
        omega: [0.0, 0.0],
        psi: 1.0,
    };

    pub fn new(tensor: Tensor2, omega: Vec2, psi: f64) -> Result<Self> {
        if !tensor.is_spd() {
            return Err(Error::InvalidParameter(format!(
                "metric tensor {tensor:?} is not positive definite"
            )));
        }
        if !(psi > 0.0 && psi.is_finite()) {
            return Err(Error::InvalidParameter(format!("metric weight {psi} must be positive")));
        }
        if !(omega[0].is_finite() && omega[1].is_finite()) {
            return Err(Error::InvalidParameter("asymmetric vector must be finite".into()));
        }
        Ok(MetricSample { tensor, omega, psi })
    }

    /// `F(u)`.
    #[inline]
    pub fn eval(&self, u: Vec2) -> f64 {
        let neg = (-dot(u, self.omega)).max(0.0);
        self.psi * (self.tensor.quad(u) + neg * neg).sqrt()
    }

    /// Upper bound on how far a unit ball of this sample departs from a disk:
    /// `√((λmax + |ω|²) / λmin)`.
    pub fn anisotropy_bound(&self) -> f64 {
        let (hi, lo) = self.tensor.eigenvalues();
        let w2 = dot(self.omega, self.omega);
        ((hi + w2) / lo).sqrt()
    }
}

/// Closed polyline of `k` points on `{u : F(u) = 1}`, at uniformly spaced
/// angles starting from the positive x axis.
pub fn unit_ball_boundary(sample: &MetricSample, k: usize) -> Result<Vec<Vec2>> {
    if k < 8 {
        return Err(Error::InvalidParameter(format!(
            "unit ball needs at least 8 samples, got {k}"
        )));
    }
    Ok((0..k)
        .map(|i| {
            let theta = std::f64::consts::TAU * i as f64 / k as f64;
            let d = [theta.cos(), theta.sin()];
            let f = sample.eval(d);
            [d[0] / f, d[1] / f]
        })
        .collect())
}

/// Per-pixel metric samples together with the mask where they apply.
#[derive(Clone, Debug)]
pub struct MetricField {
    samples: Grid<MetricSample>,
    domain: Mask,
}

impl MetricField {
    pub fn new(samples: Grid<MetricSample>, domain: Mask) -> Result<Self> {
        samples.same_dims(&domain)?;
        Ok(MetricField { samples, domain })
    }

    /// The same sample everywhere.
    pub fn uniform(width: usize, height: usize, sample: MetricSample) -> Self {
        MetricField {
            samples: Grid::new(width, height, sample),
            domain: Mask::new(width, height, true),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.samples.dims()
    }

    pub fn samples(&self) -> &Grid<MetricSample> {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut Grid<MetricSample> {
        &mut self.samples
    }

    pub fn domain(&self) -> &Mask {
        &self.domain
    }

    #[inline]
    pub fn sample(&self, idx: usize) -> &MetricSample {
        &self.samples.data()[idx]
    }

    /// Largest [`MetricSample::anisotropy_bound`] over the domain (1 if empty).
    pub fn anisotropy_bound(&self) -> f64 {
        self.samples
            .data()
            .iter()
            .zip(self.domain.data())
            .filter(|(_, &d)| d)
            .map(|(s, _)| s.anisotropy_bound())
            .fold(1.0, f64::max)
    }

    pub fn scale_psi(&mut self, factor: f64) {
        for s in self.samples.data_mut() {
            s.psi *= factor;
        }
    }
}
