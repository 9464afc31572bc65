use super::{Tensor2, Vec2};
use crate::error::{Error, Result};
use crate::grid::{gaussian_convolve, Grid, ImageGrid, ScalarField};

/// Finite-difference gradient: central differences inside the grid,
/// one-sided differences on its border.
pub fn gradient(field: &ScalarField) -> Grid<Vec2> {
    let (w, h) = field.dims();
    let f = field.data();
    Grid::from_fn(w, h, |x, y| {
        let i = y * w + x;
        let gx = if w == 1 {
            0.0
        } else if x == 0 {
            f[i + 1] - f[i]
        } else if x == w - 1 {
            f[i] - f[i - 1]
        } else {
            0.5 * (f[i + 1] - f[i - 1])
        };
        let gy = if h == 1 {
            0.0
        } else if y == 0 {
            f[i + w] - f[i]
        } else if y == h - 1 {
            f[i] - f[i - w]
        } else {
            0.5 * (f[i + w] - f[i - w])
        };
        [gx, gy]
    })
}

/// Edge information extracted from an image.
#[derive(Clone, Debug)]
pub struct EdgeFeatures {
    /// Normalized edge strength in `[0, 1]`.
    pub eta: ScalarField,
    /// Frobenius norm of the smoothed-image Jacobian.
    pub jacobian_norm: ScalarField,
    /// Edge tensor before smoothing.
    pub raw_tensor: Grid<Tensor2>,
    /// Edge tensor after entrywise Gaussian smoothing.
    pub tensor: Grid<Tensor2>,
    /// Cross-edge direction (dominant eigenvector of the gradient structure).
    pub e1: Grid<Vec2>,
    /// Along-edge direction.
    pub e2: Grid<Vec2>,
    pub beta: f64,
}

impl EdgeFeatures {
    /// Tensor used when assembling region metrics: the smoothed field when
    /// `β > 0`, otherwise the raw one (which is then isotropic anyway).
    #[inline]
    pub fn metric_tensor(&self, idx: usize) -> Tensor2 {
        if self.beta > 0.0 {
            self.tensor.data()[idx]
        } else {
            self.raw_tensor.data()[idx]
        }
    }
}

pub(crate) fn smooth_tensors(t: &Grid<Tensor2>, s: f64) -> Grid<Tensor2> {
    if s <= 0.0 {
        return t.clone();
    }
    let a = gaussian_convolve(&t.map(|m| m.m11), s);
    let b = gaussian_convolve(&t.map(|m| m.m12), s);
    let c = gaussian_convolve(&t.map(|m| m.m22), s);
    let (w, h) = t.dims();
    Grid::from_fn(w, h, |x, y| {
        Tensor2::new(*a.get(x, y), *b.get(x, y), *c.get(x, y))
    })
}

pub fn edge_features(image: &ImageGrid, sigma: f64, beta: f64, rho: f64, q: f64) -> Result<EdgeFeatures> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma {sigma} must be > 0")));
    }
    for (name, v) in [("beta", beta), ("rho", rho), ("q", q)] {
        if !(v >= 0.0) {
            return Err(Error::InvalidParameter(format!("{name} {v} must be >= 0")));
        }
    }
    let (w, h) = image.dims();
    let mut structure = Grid::new(w, h, Tensor2::ZERO);
    for m in 0..image.channels() {
        let g = gradient(&gaussian_convolve(&image.channel(m), sigma));
        for (s, d) in structure.data_mut().iter_mut().zip(g.data()) {
            s.m11 += d[0] * d[0];
            s.m12 += d[0] * d[1];
            s.m22 += d[1] * d[1];
        }
    }
    // ‖W‖_F² is the trace of W Wᵀ
    let jacobian_norm = structure.map(|s| (s.m11 + s.m22).sqrt());
    let sup = jacobian_norm.data().iter().copied().fold(0.0, f64::max);
    let eta = if sup > 0.0 {
        jacobian_norm.map(|v| v / sup)
    } else {
        Grid::new(w, h, 0.0)
    };

    let e1 = structure.map(|s| s.dominant_eigenvector());
    let e2 = e1.map(|e| [-e[1], e[0]]);
    let raw_tensor = Grid::from_fn(w, h, |x, y| {
        let n = *eta.get(x, y);
        if n == 0.0 {
            Tensor2::IDENTITY
        } else {
            Tensor2::from_eigen(*e1.get(x, y), ((beta + rho) * n).exp(), (rho * n).exp())
        }
    });
    let tensor = smooth_tensors(&raw_tensor, q);
    Ok(EdgeFeatures {
        eta,
        jacobian_norm,
        raw_tensor,
        tensor,
        e1,
        e2,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::dot;

    fn step_image() -> ImageGrid {
        let f = Grid::from_fn(24, 16, |x, _| if x < 12 { 0.2 } else { 0.8 });
        ImageGrid::from_gray(&f).unwrap()
    }

    #[test]
    fn constant_image_gives_identity() {
        let img = ImageGrid::constant(10, 8, 3, 0.4).unwrap();
        let e = edge_features(&img, 1.0, 1.0, 4.0, 2.0).unwrap();
        assert!(e.eta.data().iter().all(|&v| v == 0.0));
        assert!(e.tensor.data().iter().all(|t| *t == Tensor2::IDENTITY));
    }

    #[test]
    fn peak_eigenvalues() {
        let e = edge_features(&step_image(), 1.0, 1.0, 4.0, 2.0).unwrap();
        let peak = e
            .eta
            .data()
            .iter()
            .position(|&v| v == 1.0)
            .expect("eta attains 1");
        let (l1, l2) = e.raw_tensor.data()[peak].eigenvalues();
        assert!((l1 - 5f64.exp()).abs() < 1e-9);
        assert!((l2 - 4f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn vertical_edge_has_horizontal_cross_direction() {
        let e = edge_features(&step_image(), 1.0, 1.0, 4.0, 2.0).unwrap();
        for y in 0..16 {
            for x in [11, 12] {
                let d = *e.e1.get(x, y);
                assert!((dot(d, [1.0, 0.0]).abs() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalue_ordering_and_spd() {
        let img = ImageGrid::new(
            12,
            12,
            3,
            (0..12 * 12 * 3)
                .map(|i| ((i * 7919) % 101) as f64 / 100.0)
                .collect(),
        )
        .unwrap();
        let e = edge_features(&img, 1.0, 1.0, 4.0, 2.0).unwrap();
        for t in e.raw_tensor.data() {
            let (l1, l2) = t.eigenvalues();
            assert!(l1 >= l2 - 1e-12 && l2 >= 1.0 - 1e-12);
        }
        assert!(e.tensor.data().iter().all(|t| t.is_spd()));
        assert!(e.eta.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn gradient_of_ramp() {
        let f = Grid::from_fn(5, 4, |x, y| 2.0 * x as f64 - y as f64);
        let g = gradient(&f);
        assert!(g.data().iter().all(|d| *d == [2.0, -1.0]));
    }
}
