use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Serialize, Serializer};

use super::select_t_star;
use crate::dualfront::{init_labels, DualFront, DualFrontConfig, Shape};
use crate::eikonal::{fmm_unconstrained, Stencil};
use crate::error::{Error, Result};
use crate::grid::{depth_map, farthest_point_sampling, ImageGrid, Mask, Pixel};
use crate::metric::{thresholding_metric, ThresholdParams};

/// Segmentation method compared by the benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    /// Dual-front evolution with asymmetric metrics.
    Asymmetric,
    /// Dual-front evolution with `μ = 0`.
    Symmetric,
    /// Geodesic distance thresholding from a single point.
    Thresholding,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Asymmetric, Method::Symmetric, Method::Thresholding];
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "asym" => Ok(Method::Asymmetric),
            "sym" => Ok(Method::Symmetric),
            "thresh" => Ok(Method::Thresholding),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}' (expected asym, sym or thresh)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Asymmetric => "asym",
            Method::Symmetric => "sym",
            Method::Thresholding => "thresh",
        })
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// How the per-run seed points are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedMode {
    /// Farthest point sampling over the eroded ground truth.
    Fps,
    /// Every run starts from the deepest ground-truth pixel.
    Deepest,
}

impl FromStr for SeedMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fps" => Ok(SeedMode::Fps),
            "deepest" => Ok(SeedMode::Deepest),
            other => Err(Error::InvalidParameter(format!(
                "unknown seed mode '{other}' (expected fps or deepest)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkConfig {
    pub runs: usize,
    /// Initial circle radius, also the ground-truth erosion radius.
    pub radius: f64,
    pub mode: SeedMode,
    pub dual: DualFrontConfig,
    pub threshold: ThresholdParams,
    /// When false every `seconds` field is zero, making reports reproducible.
    pub record_timing: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            runs: 20,
            radius: 10.0,
            mode: SeedMode::Fps,
            dual: DualFrontConfig::default(),
            threshold: ThresholdParams::default(),
            record_timing: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub image: String,
    pub method: Method,
    pub run: usize,
    /// `x:y`.
    pub seed_point: String,
    pub jaccard: f64,
    pub iterations: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub ave: f64,
    pub max: f64,
    pub min: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl MethodSummary {
    fn from_scores(method: Method, scores: &[f64]) -> Self {
        let n = scores.len() as f64;
        let ave = scores.iter().sum::<f64>() / n;
        let var = scores.iter().map(|s| (s - ave).powi(2)).sum::<f64>() / n;
        MethodSummary {
            method,
            ave,
            max: scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            min: scores.iter().cloned().fold(f64::INFINITY, f64::min),
            std: var.sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub image: String,
    pub seed_points: Vec<String>,
    pub summaries: Vec<MethodSummary>,
    pub runs: Vec<RunRecord>,
}

impl BenchmarkReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    pub fn scores(&self, method: Method) -> Vec<f64> {
        self.runs
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.jaccard)
            .collect()
    }
}

fn seed_points(gt: &Mask, cfg: &BenchmarkConfig) -> Result<Vec<Pixel>> {
    let depth = depth_map(gt);
    let eroded = depth.map(|&d| d > cfg.radius);
    if eroded.count() == 0 {
        return Err(Error::EmptyErodedMask);
    }
    match cfg.mode {
        SeedMode::Fps => farthest_point_sampling(&eroded, cfg.runs, None),
        SeedMode::Deepest => {
            let deepest = farthest_point_sampling(&eroded, 1, None)?[0];
            Ok(vec![deepest; cfg.runs])
        }
    }
}

fn run_dual_front(
    image: &ImageGrid,
    gt: &Mask,
    seed: Pixel,
    radius: f64,
    cfg: &DualFrontConfig,
) -> Result<(f64, usize)> {
    let (w, h) = image.dims();
    let labels = init_labels(
        &[Shape::Circle {
            cx: seed.x as f64,
            cy: seed.y as f64,
            r: radius,
        }],
        w,
        h,
    )?;
    let mut engine = DualFront::new(image, cfg.clone())?;
    let (out, trace) = engine.run(&labels, Some(gt))?;
    let j = trace
        .final_jaccard()
        .unwrap_or_else(|| crate::dualfront::foreground_jaccard(&out, gt));
    Ok((j, trace.len()))
}

fn run_thresholding(
    image: &ImageGrid,
    gt: &Mask,
    seed: Pixel,
    params: &ThresholdParams,
) -> Result<f64> {
    let metric = thresholding_metric(image, params)?;
    let stencil = Stencil::from_anisotropy(metric.anisotropy_bound());
    let (w, h) = image.dims();
    let d = fmm_unconstrained(&[seed], &metric, &Mask::new(w, h, true), &stencil)?;
    Ok(select_t_star(&d, gt)?.jaccard)
}

/// Runs every method from `cfg.runs` seed points and aggregates the scores.
pub fn benchmark(
    name: &str,
    image: &ImageGrid,
    gt: &Mask,
    methods: &[Method],
    cfg: &BenchmarkConfig,
) -> Result<BenchmarkReport> {
    if cfg.runs == 0 {
        return Err(Error::InvalidParameter("benchmark needs at least one run".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidParameter("benchmark needs at least one method".into()));
    }
    if image.dims() != gt.dims() {
        return Err(Error::DimensionMismatch {
            expected: image.dims(),
            got: gt.dims(),
        });
    }
    let points = seed_points(gt, cfg)?;
    let label = |p: &Pixel| format!("{}:{}", p.x, p.y);
    let mut runs = Vec::new();
    let mut summaries = Vec::new();
    for &method in methods {
        let mut scores = Vec::with_capacity(points.len());
        for (k, &p) in points.iter().enumerate() {
            let start = Instant::now();
            let (j, iterations) = match method {
                Method::Asymmetric => {
                    let dual = DualFrontConfig {
                        symmetric_mode: false,
                        ..cfg.dual.clone()
                    };
                    run_dual_front(image, gt, p, cfg.radius, &dual)?
                }
                Method::Symmetric => {
                    let dual = DualFrontConfig {
                        symmetric_mode: true,
                        ..cfg.dual.clone()
                    };
                    run_dual_front(image, gt, p, cfg.radius, &dual)?
                }
                Method::Thresholding => (run_thresholding(image, gt, p, &cfg.threshold)?, 0),
            };
            let seconds = if cfg.record_timing {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            };
            scores.push(j);
            runs.push(RunRecord {
                image: name.to_string(),
                method,
                run: k,
                seed_point: label(&p),
                jaccard: j,
                iterations,
                seconds,
            });
        }
        summaries.push(MethodSummary::from_scores(method, &scores));
    }
    Ok(BenchmarkReport {
        image: name.to_string(),
        seed_points: points.iter().map(label).collect(),
        summaries,
        runs,
    })
}
