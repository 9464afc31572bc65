use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "geofront", version, about = "Geodesic dual-front image segmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve an initial partition and write labels, overlay, trace and metrics.
    Segment(SegmentArgs),
    /// Compute a geodesic distance field, optionally with the best threshold.
    Distance(DistanceArgs),
    /// Compare segmentation methods over many seed points.
    Benchmark(BenchmarkArgs),
}

/// Options shared by every command that reads a configuration.
#[derive(Debug, Args, Clone, Default)]
pub struct ConfigArgs {
    /// `key=value` configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Seed for every stochastic component.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Upper bound on evolution steps.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Write zero for every wall-clock measurement, making outputs reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Input image (PNG, PPM or PGM).
    #[arg(long, value_name = "FILE")]
    pub image: PathBuf,
    /// Initial regions, e.g. `circle:40,30,8;rect:2,2,10,12`. Defaults to a
    /// centred circle.
    #[arg(long, value_name = "SHAPES")]
    pub init: Option<String>,
    /// Initial label image instead of shapes.
    #[arg(long, value_name = "FILE", conflicts_with = "init")]
    pub init_labels: Option<PathBuf>,
    /// Ground-truth mask; enables Jaccard reporting.
    #[arg(long, value_name = "FILE")]
    pub gt: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    /// Input image; required by the `threshold` metric.
    #[arg(long, value_name = "FILE")]
    pub image: Option<PathBuf>,
    /// Grid size `WxH` when no image is given.
    #[arg(long, value_name = "WxH")]
    pub size: Option<String>,
    /// `threshold` (edge-driven, needs an image) or `unit` (Euclidean).
    #[arg(long, value_name = "KIND")]
    pub metric: Option<String>,
    /// Source pixel `x,y`; repeatable.
    #[arg(long = "source", value_name = "X,Y")]
    pub sources: Vec<String>,
    /// Mask whose foreground pixels are sources.
    #[arg(long, value_name = "FILE")]
    pub source_mask: Option<PathBuf>,
    /// Prescribed distance map (FGRID) gating the propagation.
    #[arg(long, value_name = "FILE")]
    pub phi: Option<PathBuf>,
    /// Constant prescribed distance.
    #[arg(long, value_name = "VALUE", conflicts_with = "phi")]
    pub phi_const: Option<f64>,
    /// Stencil radius or `auto`.
    #[arg(long, default_value = "auto")]
    pub stencil: String,
    /// Ground-truth mask for `--tstar`.
    #[arg(long, value_name = "FILE")]
    pub gt: Option<PathBuf>,
    /// Select the best-Jaccard threshold and write its mask.
    #[arg(long)]
    pub tstar: bool,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Image paired with the `--gt` at the same position; repeatable.
    #[arg(long = "image", value_name = "FILE")]
    pub images: Vec<PathBuf>,
    /// Ground-truth mask; repeatable.
    #[arg(long = "gt", value_name = "FILE")]
    pub gts: Vec<PathBuf>,
    /// Generated test image: `disk`, `appendage` or `multilobe`; repeatable.
    #[arg(long = "synthetic", value_name = "SHAPE")]
    pub synthetic: Vec<String>,
    /// Size of generated images.
    #[arg(long, default_value = "64x64", value_name = "WxH")]
    pub size: String,
    /// Noise standard deviation of generated images.
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    /// Noise seed of generated images.
    #[arg(long, default_value_t = 0)]
    pub noise_seed: u64,
    /// Comma-separated subset of `asym,sym,thresh`.
    #[arg(long, default_value = "asym,sym,thresh")]
    pub methods: String,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Initial circle radius and ground-truth erosion radius.
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    /// Seed-point selection: `fps` or `deepest`.
    #[arg(long, default_value = "fps")]
    pub mode: String,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}
