use super::edge::smooth_tensors;
use super::{gradient, norm, EdgeFeatures, MetricField, MetricSample, Tensor2, Vec2};
use crate::error::{Error, Result};
use crate::grid::{signed_distance, ContourGeometry, Grid, LabelMap, Mask, ScalarField};

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
fn unit(v: Vec2) -> Vec2 {
    let n = norm(v);
    if n < 1e-12 {
        [0.0, 0.0]
    } else {
        [v[0] / n, v[1] / n]
    }
}

fn check_xi(labels: &LabelMap, xi: &[ScalarField]) -> Result<()> {
    if xi.len() != labels.count() as usize {
        return Err(Error::InvalidParameter(format!(
            "expected {} velocity fields, got {}",
            labels.count(),
            xi.len()
        )));
    }
    for f in xi {
        labels.grid().same_dims(f)?;
    }
    Ok(())
}

/// Motion direction fields `n_i` on each band `U_i`, indexed by `label - 1`.
///
/// Off the contour, `n_i` is the unit gradient of the contour distance,
/// oriented into region `i` and signed by `ξ_i − ξ_j`, where `j` is the
/// region whose interface with `i` is nearest. On contour pixels touching
/// region `i`, the inward normal of region `i` replaces the distance
/// gradient. Everything else is zero.
pub fn motion_vector_field(labels: &LabelMap, xi: &[ScalarField], ell: f64) -> Result<Vec<Grid<Vec2>>> {
    check_xi(labels, xi)?;
    let geom = ContourGeometry::new(labels, ell)?;
    Ok(motion_vector_field_with(labels, &geom, xi))
}

pub fn motion_vector_field_with(
    labels: &LabelMap,
    geom: &ContourGeometry,
    xi: &[ScalarField],
) -> Vec<Grid<Vec2>> {
    let g = labels.grid();
    let (w, h) = labels.dims();
    let n = labels.count();
    if n < 2 {
        return (0..n).map(|_| Grid::new(w, h, [0.0, 0.0])).collect();
    }
    let contour_dir = gradient(&geom.contour_distance).map(|d| unit(*d));

    (1..=n)
        .map(|i| {
            let band = &geom.region_bands[i as usize - 1];
            let inward = gradient(&signed_distance(&labels.region_mask(i)))
                .map(|d| unit([-d[0], -d[1]]));
            let xi_i = xi[i as usize - 1].data();
            let mut field = Grid::new(w, h, [0.0, 0.0]);
            for idx in 0..g.len() {
                if !band.data()[idx] {
                    continue;
                }
                let j = geom.interfaces.partner(i, idx);
                if j == 0 {
                    continue;
                }
                let s = sign(xi_i[idx] - xi[j as usize - 1].data()[idx]);
                let here = g.data()[idx];
                let v = if geom.boundary.data()[idx] {
                    let touches_i = if here == i {
                        g.neighbors4(idx).any(|nb| g.data()[nb] != i)
                    } else {
                        g.neighbors4(idx).any(|nb| g.data()[nb] == i)
                    };
                    if !touches_i {
                        continue;
                    }
                    inward.data()[idx]
                } else {
                    let d = contour_dir.data()[idx];
                    if here == i {
                        d
                    } else {
                        [-d[0], -d[1]]
                    }
                };
                field.data_mut()[idx] = [s * v[0], s * v[1]];
            }
            field
        })
        .collect()
}

/// Projects each vector onto the dominant orientation of the locally
/// averaged tensor `G_a ∗ (n nᵀ)`.
pub fn smooth_vectors(field: &Grid<Vec2>, a: f64) -> Grid<Vec2> {
    let outer = field.map(|v| Tensor2::outer(*v));
    let avg = smooth_tensors(&outer, a);
    let (w, h) = field.dims();
    Grid::from_fn(w, h, |x, y| {
        let v = *field.get(x, y);
        if v == [0.0, 0.0] {
            return v;
        }
        let e = avg.get(x, y).dominant_eigenvector();
        let p = v[0] * e[0] + v[1] * e[1];
        [p * e[0], p * e[1]]
    })
}

/// Speed weights `ψ_i`, indexed by `label - 1`; equal to 1 outside `U_i`.
pub fn speed_weight(labels: &LabelMap, xi: &[ScalarField], alpha: f64, ell: f64) -> Result<Vec<ScalarField>> {
    check_xi(labels, xi)?;
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} must be >= 0")));
    }
    let geom = ContourGeometry::new(labels, ell)?;
    Ok(speed_weight_with(labels, &geom, xi, alpha))
}

pub fn speed_weight_with(
    labels: &LabelMap,
    geom: &ContourGeometry,
    xi: &[ScalarField],
    alpha: f64,
) -> Vec<ScalarField> {
    let (w, h) = labels.dims();
    let n = labels.count();
    let len = w * h;
    (1..=n)
        .map(|i| {
            let mut psi = Grid::new(w, h, 1.0);
            if n < 2 || alpha == 0.0 {
                return psi;
            }
            let band = geom.region_bands[i as usize - 1].data();
            let xi_i = xi[i as usize - 1].data();
            let mut sup = vec![0.0f64; n as usize + 1];
            let mut diff = vec![0.0; len];
            for idx in 0..len {
                if !band[idx] {
                    continue;
                }
                let j = geom.interfaces.partner(i, idx) as usize;
                if j == 0 {
                    continue;
                }
                diff[idx] = xi_i[idx] - xi[j - 1].data()[idx];
                sup[j] = sup[j].max(diff[idx].abs());
            }
            for idx in 0..len {
                if !band[idx] {
                    continue;
                }
                let j = geom.interfaces.partner(i, idx) as usize;
                if j != 0 && sup[j] > 0.0 {
                    psi.data_mut()[idx] = (alpha * diff[idx] / sup[j]).exp();
                }
            }
            psi
        })
        .collect()
}

/// Region metric on `domain`: edge tensor, `ω = μ ñ`, weight `ψ`. Samples
/// outside the domain are Euclidean placeholders.
pub fn assemble_metric(
    edge: &EdgeFeatures,
    directions: &Grid<Vec2>,
    psi: &ScalarField,
    mu: f64,
    domain: &Mask,
) -> Result<MetricField> {
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("mu {mu} must be >= 0")));
    }
    edge.eta.same_dims(directions)?;
    edge.eta.same_dims(psi)?;
    edge.eta.same_dims(domain)?;
    let (w, h) = domain.dims();
    let mut samples = Grid::new(w, h, MetricSample::EUCLIDEAN);
    for idx in 0..w * h {
        if !domain.data()[idx] {
            continue;
        }
        let d = directions.data()[idx];
        samples.data_mut()[idx] = MetricSample {
            tensor: edge.metric_tensor(idx),
            omega: [mu * d[0], mu * d[1]],
            psi: psi.data()[idx],
        };
    }
    MetricField::new(samples, domain.clone())
}
