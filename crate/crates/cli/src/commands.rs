use std::fs;
use std::path::Path;

use geofront::dualfront::{foreground_jaccard, init_labels, parse_shapes, run, EvolutionTrace, Shape};
use geofront::eikonal::{fmm_prescribed, fmm_unconstrained, Stencil};
use geofront::eval::{
    benchmark as run_benchmark, make_synthetic, select_t_star, BenchmarkConfig, BenchmarkReport,
    Method, SeedMode, SyntheticShape,
};
use geofront::metric::{thresholding_metric, MetricField, MetricSample};
use geofront::{Grid, ImageGrid, Mask, Pixel, ScalarField};
use serde_json::json;

use crate::args::{BenchmarkArgs, ConfigArgs, DistanceArgs, SegmentArgs};
use crate::config::Settings;
use crate::{io, CliError};

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn write_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("cannot write {}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| write_error(path, e))
}

fn create_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

/// Defaults, config file, `--set` overrides, then the dedicated flags.
pub fn load_settings(args: &ConfigArgs) -> Result<Settings, CliError> {
    let mut s = Settings::load(args.config.as_deref(), &args.set)?;
    if let Some(seed) = args.seed {
        s.dual.seed = seed;
    }
    if let Some(m) = args.max_iters {
        s.dual.max_iters = m;
    }
    s.dual.validate().map_err(usage)?;
    Ok(s)
}

/// Parses `WxH`.
pub fn parse_size(s: &str) -> Result<(usize, usize), CliError> {
    s.split_once('x')
        .and_then(|(w, h)| Some((w.trim().parse().ok()?, h.trim().parse().ok()?)))
        .filter(|&(w, h): &(usize, usize)| w >= 3 && h >= 3)
        .ok_or_else(|| CliError::Usage(format!("size must be WxH with both sides >= 3, got '{s}'")))
}

fn check_dims<T, U>(a: &Grid<T>, b: &Grid<U>, what: &str) -> Result<(), CliError> {
    if a.dims() != b.dims() {
        return Err(CliError::Runtime(format!(
            "{what} is {:?} but the image is {:?}",
            b.dims(),
            a.dims()
        )));
    }
    Ok(())
}

fn default_init(w: usize, h: usize) -> Shape {
    Shape::Circle {
        cx: (w as f64 - 1.0) / 2.0,
        cy: (h as f64 - 1.0) / 2.0,
        r: (w.min(h) as f64 / 8.0).max(2.0),
    }
}

fn trace_csv(trace: &EvolutionTrace, timing: bool) -> Result<Vec<u8>, CliError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Runtime(e.to_string());
    wtr.write_record([
        "iteration",
        "changed",
        "band_pixels",
        "changed_fraction",
        "jaccard",
        "seconds",
        "stencil_radius",
        "areas",
    ])
    .map_err(err)?;
    for s in &trace.steps {
        let areas: Vec<String> = s.areas.iter().map(|a| a.to_string()).collect();
        wtr.write_record([
            s.iteration.to_string(),
            s.changed.to_string(),
            s.band_pixels.to_string(),
            s.changed_fraction().to_string(),
            s.jaccard.map_or(String::new(), |j| j.to_string()),
            if timing { s.seconds.to_string() } else { "0".into() },
            s.stencil_radius.to_string(),
            areas.join(";"),
        ])
        .map_err(err)?;
    }
    wtr.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

/// Writes `labels.png`, `overlay.png`, `trace.csv` and `metrics.json`.
pub fn segment(a: &SegmentArgs) -> Result<(), CliError> {
    let settings = load_settings(&a.config)?;
    let image = io::read_image(&a.image)?;
    let (w, h) = image.dims();
    let labels0 = match (&a.init_labels, &a.init) {
        (Some(path), _) => io::read_labels(path)?,
        (None, spec) => {
            let shapes = match spec {
                Some(s) => parse_shapes(s).map_err(usage)?,
                None => vec![default_init(w, h)],
            };
            init_labels(&shapes, w, h).map_err(usage)?
        }
    };
    let template = Grid::new(w, h, 0u8);
    check_dims(&template, labels0.grid(), "the initial label map")?;
    let gt = a.gt.as_deref().map(io::read_mask).transpose()?;
    if let Some(g) = &gt {
        check_dims(&template, g, "the ground truth")?;
    }
    create_out_dir(&a.out)?;

    let (labels, trace) = run(&labels0, &image, &settings.dual, gt.as_ref())?;
    let timing = !a.config.no_timing;

    io::write_labels(&a.out.join("labels.png"), &labels)?;
    io::write_overlay(&a.out.join("overlay.png"), &image, &labels)?;
    let csv_path = a.out.join("trace.csv");
    fs::write(&csv_path, trace_csv(&trace, timing)?).map_err(|e| write_error(&csv_path, e))?;

    let seconds = if timing && !trace.is_empty() {
        trace.steps.iter().map(|s| s.seconds).sum::<f64>() / trace.len() as f64
    } else {
        0.0
    };
    let mut metrics = json!({
        "iterations": trace.len(),
        "regions": labels.count(),
        "seconds_per_step": seconds,
    });
    if let Some(g) = &gt {
        metrics["jaccard"] = json!(foreground_jaccard(&labels, g));
    }
    let text = serde_json::to_string_pretty(&metrics).expect("plain JSON value");
    write_text(&a.out.join("metrics.json"), &(text + "\n"))
}

fn parse_point(s: &str) -> Result<Pixel, CliError> {
    s.split_once(',')
        .and_then(|(x, y)| Some(Pixel::new(x.trim().parse().ok()?, y.trim().parse().ok()?)))
        .ok_or_else(|| CliError::Usage(format!("source must be X,Y, got '{s}'")))
}

/// Writes `distance.fgrid` and, with `--tstar`, `tstar.png` and `tstar.json`.
pub fn distance(a: &DistanceArgs) -> Result<(), CliError> {
    let settings = load_settings(&a.config)?;
    if a.tstar && a.gt.is_none() {
        return Err(CliError::Usage("--tstar needs a ground truth (--gt)".into()));
    }
    let kind = a
        .metric
        .clone()
        .unwrap_or_else(|| if a.image.is_some() { "threshold" } else { "unit" }.into());
    if kind != "unit" && kind != "threshold" {
        return Err(CliError::Usage(format!(
            "unknown metric '{kind}' (expected unit or threshold)"
        )));
    }
    if kind == "threshold" && a.image.is_none() {
        return Err(CliError::Usage("the threshold metric needs --image".into()));
    }
    let stencil_choice: Option<u32> = match a.stencil.trim() {
        "auto" => None,
        r => Some(r.parse().ok().filter(|&r: &u32| r >= 1).ok_or_else(|| {
            CliError::Usage(format!("stencil must be 'auto' or a positive radius, got '{r}'"))
        })?),
    };
    let mut sources: Vec<Pixel> = a.sources.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?;
    if sources.is_empty() && a.source_mask.is_none() {
        return Err(CliError::Usage("give at least one --source or a --source-mask".into()));
    }

    let image: Option<ImageGrid> = a.image.as_deref().map(io::read_image).transpose()?;
    let (w, h) = match (&image, &a.size) {
        (Some(img), _) => img.dims(),
        (None, Some(s)) => parse_size(s)?,
        (None, None) => return Err(CliError::Usage("give --image or --size".into())),
    };
    let template = Grid::new(w, h, 0u8);
    if let Some(path) = &a.source_mask {
        let m = io::read_mask(path)?;
        check_dims(&template, &m, "the source mask")?;
        sources.extend(m.pixels());
    }
    let metric = match image {
        Some(ref img) if kind == "threshold" => thresholding_metric(img, &settings.threshold)?,
        _ => MetricField::uniform(w, h, MetricSample::EUCLIDEAN),
    };
    let stencil = match stencil_choice {
        Some(r) => Stencil::ring(r).map_err(usage)?,
        None => Stencil::from_anisotropy(metric.anisotropy_bound()),
    };
    let phi: Option<ScalarField> = match (&a.phi, a.phi_const) {
        (Some(path), _) => Some(io::read_fgrid(path)?),
        (None, Some(v)) => Some(Grid::new(w, h, v)),
        _ => None,
    };
    let gt = a.gt.as_deref().map(io::read_mask).transpose()?;
    if let Some(p) = &phi {
        check_dims(&template, p, "the prescribed distance map")?;
    }
    if let Some(g) = &gt {
        check_dims(&template, g, "the ground truth")?;
    }
    create_out_dir(&a.out)?;

    let active = Mask::new(w, h, true);
    let d = match &phi {
        Some(p) => fmm_prescribed(&sources, &metric, &active, p, &stencil)?,
        None => fmm_unconstrained(&sources, &metric, &active, &stencil)?,
    };
    io::write_fgrid(&a.out.join("distance.fgrid"), &d)?;
    if a.tstar {
        let gt = gt.expect("checked above");
        let c = select_t_star(&d, &gt)?;
        io::write_mask(&a.out.join("tstar.png"), &c.mask)?;
        let report = json!({ "t": c.t, "t1": c.t1, "t2": c.t2, "jaccard": c.jaccard });
        let text = serde_json::to_string_pretty(&report).expect("plain JSON value");
        write_text(&a.out.join("tstar.json"), &(text + "\n"))?;
    }
    Ok(())
}

fn parse_methods(s: &str) -> Result<Vec<Method>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let m: Method = part.parse().map_err(usage)?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    Ok(out)
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Writes `report.json` (one report per input) and `report.csv` (every run).
pub fn benchmark(a: &BenchmarkArgs) -> Result<(), CliError> {
    let settings = load_settings(&a.config)?;
    let methods = parse_methods(&a.methods)?;
    let mode: SeedMode = a.mode.parse().map_err(usage)?;
    if a.images.len() != a.gts.len() {
        return Err(CliError::Usage(format!(
            "{} images but {} ground truths",
            a.images.len(),
            a.gts.len()
        )));
    }
    let shapes: Vec<SyntheticShape> = a
        .synthetic
        .iter()
        .map(|s| s.parse().map_err(usage))
        .collect::<Result<_, _>>()?;
    if shapes.is_empty() && a.images.is_empty() {
        return Err(CliError::Usage("give --image/--gt pairs or --synthetic shapes".into()));
    }
    let (sw, sh) = parse_size(&a.size)?;
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    if !(a.radius > 0.0 && a.radius.is_finite()) {
        return Err(CliError::Usage(format!("--radius must be > 0, got {}", a.radius)));
    }
    let cfg = BenchmarkConfig {
        runs: a.runs,
        radius: a.radius,
        mode,
        dual: settings.dual.clone(),
        threshold: settings.threshold,
        record_timing: !a.config.no_timing,
    };

    let mut inputs: Vec<(String, ImageGrid, Mask)> = Vec::new();
    for (img, gt) in a.images.iter().zip(&a.gts) {
        let image = io::read_image(img)?;
        let mask = io::read_mask(gt)?;
        check_dims(&Grid::new(image.width(), image.height(), 0u8), &mask, "the ground truth")?;
        inputs.push((file_name(img), image, mask));
    }
    for shape in shapes {
        let (image, mask) = make_synthetic(shape, sw, sh, a.noise, a.noise_seed).map_err(usage)?;
        inputs.push((format!("{shape}-{sw}x{sh}"), image, mask));
    }
    create_out_dir(&a.out)?;

    let reports: Vec<BenchmarkReport> = inputs
        .iter()
        .map(|(name, image, mask)| run_benchmark(name, image, mask, &methods, &cfg))
        .collect::<Result<_, _>>()?;

    let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
    write_text(&a.out.join("report.json"), &(text + "\n"))?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for r in reports.iter().flat_map(|r| &r.runs) {
        wtr.serialize(r).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    let csv_path = a.out.join("report.csv");
    fs::write(&csv_path, bytes).map_err(|e| write_error(&csv_path, e))
}
