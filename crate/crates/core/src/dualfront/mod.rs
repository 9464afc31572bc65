//! Contour evolution engine.
//!
//! One step extracts the offset bands of every region, builds the
//! data-driven asymmetric metrics on the region bands, propagates the fronts
//! and relabels the contour band with the resulting Voronoi index.

mod config;
mod init;

pub use config::{DualFrontConfig, StencilPolicy, CONFIG_KEYS};
pub use init::{init_labels, parse_shapes, Shape};

use std::time::Instant;

use crate::eikonal::{voronoi_from_fronts, Stencil, VoronoiDiagram};
use crate::error::{Error, Result};
use crate::eval::jaccard;
use crate::grid::{ContourGeometry, Grid, ImageGrid, LabelMap, Mask, PointSet, ScalarField};
use crate::metric::{
    assemble_metric, edge_features, motion_vector_field_with, smooth_vectors, speed_weight_with,
    EdgeFeatures, MetricField,
};
use crate::region::{
    bhattacharyya_xi, fit_region_mixtures, gmm_xi, piecewise_constant_xi, GaussianMixture,
    RegionModelKind,
};

/// Summary of one evolution step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// 1-based.
    pub iteration: usize,
    pub changed: usize,
    /// `|U_Γ|` before the step.
    pub band_pixels: usize,
    /// Region areas after the step, indexed by `label - 1`.
    pub areas: Vec<usize>,
    /// Overlap of the non-background regions with the ground truth.
    pub jaccard: Option<f64>,
    pub seconds: f64,
    pub stencil_radius: u32,
}

impl StepRecord {
    pub fn changed_fraction(&self) -> f64 {
        if self.band_pixels == 0 {
            0.0
        } else {
            self.changed as f64 / self.band_pixels as f64
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvolutionTrace {
    pub steps: Vec<StepRecord>,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_jaccard(&self) -> Option<f64> {
        self.steps.last().and_then(|s| s.jaccard)
    }

    /// First iteration whose Jaccard reaches `target`.
    pub fn iterations_to_reach(&self, target: f64) -> Option<usize> {
        self.steps
            .iter()
            .find(|s| s.jaccard.is_some_and(|j| j >= target))
            .map(|s| s.iteration)
    }
}

/// Everything a step computed, for inspection.
#[derive(Clone, Debug)]
pub struct StepArtifacts {
    pub labels: LabelMap,
    pub changed: usize,
    pub band: Mask,
    pub sources: Vec<PointSet>,
    pub metrics: Vec<MetricField>,
    pub voronoi: VoronoiDiagram,
    pub stencil: Stencil,
    /// Old label of every surviving region, indexed by new `label - 1`.
    pub survivors: Vec<u32>,
}

/// Evolution engine bound to one image. Caches the edge tensor field and
/// the latest mixture fits.
pub struct DualFront<'a> {
    image: &'a ImageGrid,
    cfg: DualFrontConfig,
    edge: EdgeFeatures,
    warm: Option<Vec<GaussianMixture>>,
}

impl<'a> DualFront<'a> {
    pub fn new(image: &'a ImageGrid, cfg: DualFrontConfig) -> Result<Self> {
        cfg.validate()?;
        let edge = edge_features(image, cfg.sigma, cfg.beta, cfg.rho, cfg.q)?;
        Ok(DualFront {
            image,
            cfg,
            edge,
            warm: None,
        })
    }

    pub fn config(&self) -> &DualFrontConfig {
        &self.cfg
    }

    pub fn edge(&self) -> &EdgeFeatures {
        &self.edge
    }

    fn velocities(&mut self, labels: &LabelMap) -> Result<Vec<ScalarField>> {
        match self.cfg.model {
            RegionModelKind::PiecewiseConstant => piecewise_constant_xi(self.image, labels),
            RegionModelKind::Gmm { components } => {
                let warm = self
                    .warm
                    .as_deref()
                    .filter(|w| w.len() == labels.count() as usize);
                let fit = fit_region_mixtures(
                    self.image,
                    labels,
                    components,
                    self.cfg.em_iters,
                    self.cfg.seed,
                    warm,
                )?;
                let xi = gmm_xi(self.image, &fit.mixtures);
                self.warm = Some(fit.mixtures);
                Ok(xi)
            }
            RegionModelKind::Bhattacharyya => {
                bhattacharyya_xi(self.image, labels, self.cfg.bandwidth, self.cfg.bins)
            }
        }
    }

    /// Region metrics on their bands and the front sources.
    pub fn build_metrics(
        &mut self,
        labels: &LabelMap,
    ) -> Result<(ContourGeometry, Vec<PointSet>, Vec<MetricField>)> {
        let n = labels.count();
        if n < 2 {
            return Err(Error::InvalidLabels(format!(
                "evolution needs at least two regions, got {n}"
            )));
        }
        if labels.dims() != self.image.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.image.dims(),
                got: labels.dims(),
            });
        }
        let xi = self.velocities(labels)?;
        let geom = ContourGeometry::new(labels, self.cfg.ell)?;
        let sources = (1..=n)
            .map(|i| geom.offset_band(labels, i))
            .collect::<Result<Vec<_>>>()?;
        let directions = motion_vector_field_with(labels, &geom, &xi);
        let psi = if self.cfg.single_metric_mode {
            let (w, h) = labels.dims();
            vec![Grid::new(w, h, 1.0); n as usize]
        } else {
            speed_weight_with(labels, &geom, &xi, self.cfg.alpha)
        };
        let mu = self.cfg.effective_mu();
        let mut metrics = Vec::with_capacity(n as usize);
        for i in 0..n as usize {
            let mut smoothed = smooth_vectors(&directions[i], self.cfg.a);
            if self.cfg.single_metric_mode {
                for (v, &on) in smoothed.data_mut().iter_mut().zip(geom.boundary.data()) {
                    if on {
                        *v = [0.0, 0.0];
                    }
                }
            }
            metrics.push(assemble_metric(
                &self.edge,
                &smoothed,
                &psi[i],
                mu,
                &geom.region_bands[i],
            )?);
        }
        Ok((geom, sources, metrics))
    }

    fn stencil_for(&self, metrics: &[MetricField]) -> Result<Stencil> {
        match self.cfg.stencil {
            StencilPolicy::Fixed(r) => Stencil::ring(r),
            StencilPolicy::Auto => Ok(Stencil::from_anisotropy(
                metrics
                    .iter()
                    .map(MetricField::anisotropy_bound)
                    .fold(1.0, f64::max),
            )),
        }
    }

    /// One evolution step with all intermediate results.
    pub fn step_artifacts(&mut self, labels: &LabelMap) -> Result<StepArtifacts> {
        let (geom, sources, metrics) = self.build_metrics(labels)?;
        let stencil = self.stencil_for(&metrics)?;
        let voronoi = voronoi_from_fronts(&sources, &metrics, &geom.region_bands, &stencil)?;

        let mut raw = labels.grid().clone();
        let mut changed = 0;
        for ((l, &win), &in_band) in raw
            .data_mut()
            .iter_mut()
            .zip(voronoi.index.data())
            .zip(geom.band.data())
        {
            if in_band && win != 0 && *l != win {
                *l = win;
                changed += 1;
            }
        }
        let (next, survivors) = LabelMap::compact(raw, labels.count())?;
        if let Some(w) = self.warm.take() {
            if survivors.len() < w.len() {
                self.warm = Some(survivors.iter().map(|&old| w[old as usize - 1].clone()).collect());
            } else {
                self.warm = Some(w);
            }
        }
        Ok(StepArtifacts {
            labels: next,
            changed,
            band: geom.band,
            sources,
            metrics,
            voronoi,
            stencil,
            survivors,
        })
    }

    pub fn step(&mut self, labels: &LabelMap) -> Result<(LabelMap, StepRecord)> {
        let start = Instant::now();
        let art = self.step_artifacts(labels)?;
        let record = StepRecord {
            iteration: 1,
            changed: art.changed,
            band_pixels: art.band.count(),
            areas: art.labels.areas(),
            jaccard: None,
            seconds: start.elapsed().as_secs_f64(),
            stencil_radius: art.stencil.radius(),
        };
        Ok((art.labels, record))
    }

    /// Iterates until the changed fraction of the contour band drops below
    /// `stop_fraction`, `max_iters` steps have run, or a single region is
    /// left.
    pub fn run(&mut self, labels0: &LabelMap, gt: Option<&Mask>) -> Result<(LabelMap, EvolutionTrace)> {
        if let Some(gt) = gt {
            labels0.grid().same_dims(gt)?;
        }
        let mut labels = labels0.clone();
        let mut trace = EvolutionTrace::default();
        for iteration in 1..=self.cfg.max_iters {
            if labels.count() < 2 {
                break;
            }
            let (next, mut record) = self.step(&labels)?;
            record.iteration = iteration;
            record.jaccard = gt.map(|g| foreground_jaccard(&next, g));
            let stop = record.changed_fraction() < self.cfg.stop_fraction;
            labels = next;
            trace.steps.push(record);
            if stop {
                break;
            }
        }
        Ok((labels, trace))
    }
}

/// Jaccard index of all non-background regions against `gt`.
pub fn foreground_jaccard(labels: &LabelMap, gt: &Mask) -> f64 {
    let fg = labels.grid().map(|&l| l >= 2);
    jaccard(&fg, gt).expect("dimensions checked by caller")
}

/// Single step with a fresh engine.
pub fn evolve_step(
    labels: &LabelMap,
    image: &ImageGrid,
    cfg: &DualFrontConfig,
) -> Result<(LabelMap, StepRecord)> {
    DualFront::new(image, cfg.clone())?.step(labels)
}

/// Full evolution with a fresh engine.
pub fn run(
    labels0: &LabelMap,
    image: &ImageGrid,
    cfg: &DualFrontConfig,
    gt: Option<&Mask>,
) -> Result<(LabelMap, EvolutionTrace)> {
    DualFront::new(image, cfg.clone())?.run(labels0, gt)
}
