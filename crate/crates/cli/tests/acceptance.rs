//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its measured values and runtime; the process fails if any does.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use geofront::dualfront::{evolve_step, init_labels, run, DualFrontConfig, Shape};
use geofront::eikonal::{fmm_unconstrained, voronoi_from_fronts, Stencil};
use geofront::eval::{benchmark, make_synthetic, BenchmarkConfig, Method, SyntheticShape};
use geofront::grid::boundary_mask;
use geofront::metric::{MetricField, MetricSample, Tensor2};
use geofront::region::{
    bhattacharyya_coefficient, fit_mixture, fit_region_mixtures, region_histograms, RegionModelKind,
};
use geofront::{Grid, ImageGrid, LabelMap, Mask, Pixel};
use image::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tempfile::TempDir;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() <= budget_s, || {
        format!("took {:.2}s, budget {budget_s}s", elapsed.as_secs_f64())
    })
}

fn random_sample(rng: &mut ChaCha8Rng) -> MetricSample {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let l1 = 10f64.powf(rng.gen_range(-1.0..2.0));
    let l2 = 10f64.powf(rng.gen_range(-1.0..2.0));
    let omega = [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)];
    let tensor = Tensor2::from_eigen([theta.cos(), theta.sin()], l1, l2);
    MetricSample::new(tensor, omega, rng.gen_range(0.1..5.0)).unwrap()
}

fn metric_axioms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut hom, mut conv, mut tri) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let s = random_sample(&mut rng);
        let u = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let v = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let lambda: f64 = rng.gen_range(0.01..100.0);
        let (fu, fv) = (s.eval(u), s.eval(v));
        let scaled = s.eval([lambda * u[0], lambda * u[1]]);
        hom = hom.max((scaled - lambda * fu).abs() / (lambda * fu));
        let mid = s.eval([(u[0] + v[0]) / 2.0, (u[1] + v[1]) / 2.0]);
        conv = conv.max((mid - (fu + fv) / 2.0) / ((fu + fv) / 2.0));
        let sum = s.eval([u[0] + v[0], u[1] + v[1]]);
        tri = tri.max((sum - (fu + fv)) / (fu + fv));
    }
    ensure(hom <= 1e-12, || format!("homogeneity error {hom:e}"))?;
    ensure(conv <= 1e-9, || format!("convexity violation {conv:e}"))?;
    ensure(tri <= 1e-9, || format!("triangle violation {tri:e}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "homogeneity {hom:.1e}, worst convexity excess {conv:.1e}, worst triangle excess {tri:.1e}"
    ))
}

fn isotropic_accuracy() -> Outcome {
    let start = Instant::now();
    let n = 201;
    let c = 100usize;
    let m = MetricField::uniform(n, n, MetricSample::EUCLIDEAN);
    let st = Stencil::ring(2).unwrap();
    let d = fmm_unconstrained(&[Pixel::new(c, c)], &m, &Mask::new(n, n, true), &st).unwrap();
    let mut worst = 0.0f64;
    for y in 0..n {
        for x in 0..n {
            let e = ((x as f64 - c as f64).powi(2) + (y as f64 - c as f64).powi(2)).sqrt();
            if e > 0.0 {
                worst = worst.max((d.get(x, y) - e).abs() / e);
            }
        }
    }
    let axis_exact = (0..=c).all(|k| {
        [d.get(c + k, c), d.get(c - k, c), d.get(c, c + k), d.get(c, c - k)]
            .iter()
            .all(|&&v| v == k as f64)
    });
    ensure(worst <= 0.01, || format!("max relative error {worst:.4}"))?;
    ensure(axis_exact, || "axis pixels are not exact".into())?;
    within(start.elapsed(), 2.0)?;
    Ok(format!("max relative error {:.3}%, axis exact", 100.0 * worst))
}

/// Shortest paths on the stencil graph with metric edge costs.
fn stencil_dijkstra(n: usize, src: usize, metric: &MetricSample, stencil: &Stencil) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n * n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Reverse((0u64, src)));
    while let Some(Reverse((key, idx))) = heap.pop() {
        let dv = f64::from_bits(key);
        if dv > dist[idx] {
            continue;
        }
        let (x, y) = ((idx % n) as i64, (idx / n) as i64);
        for v in stencil.offsets() {
            let (nx, ny) = (x + v[0], y + v[1]);
            if nx < 0 || ny < 0 || nx >= n as i64 || ny >= n as i64 {
                continue;
            }
            let j = ny as usize * n + nx as usize;
            let cand = dv + metric.eval([v[0] as f64, v[1] as f64]);
            if cand < dist[j] {
                dist[j] = cand;
                heap.push(Reverse((cand.to_bits(), j)));
            }
        }
    }
    dist
}

fn asymmetry_direction() -> Outcome {
    let start = Instant::now();
    let n = 101;
    let c = 50usize;
    let sample = MetricSample::new(Tensor2::IDENTITY, [3.0, 0.0], 1.0).unwrap();
    let m = MetricField::uniform(n, n, sample);
    let st = Stencil::from_anisotropy(m.anisotropy_bound());
    let d = fmm_unconstrained(&[Pixel::new(c, c)], &m, &Mask::new(n, n, true), &st).unwrap();
    let oracle = stencil_dijkstra(n, c * n + c, &sample, &st);
    let mut gap = 0.0f64;
    for k in 1..=50usize {
        let (right, left) = (*d.get(c + k, c), *d.get(c - k, c));
        ensure(right < left, || format!("k={k}: D(+k)={right} >= D(-k)={left}"))?;
        gap = gap
            .max((right - oracle[c * n + c + k]).abs())
            .max((left - oracle[c * n + c - k]).abs());
    }
    ensure(gap <= 1e-6, || format!("deviation from graph oracle {gap:e}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "D(+k,0) < D(-k,0) for k = 1..50, max deviation from graph oracle {gap:.1e}"
    ))
}

fn random_metric(rng: &mut ChaCha8Rng, w: usize, h: usize) -> MetricField {
    let (ax, ay) = (rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
    let theta0: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (l1, l2) = (rng.gen_range(1.0..3.0), rng.gen_range(0.5..1.5));
    let omega = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let psi0 = rng.gen_range(0.5..2.0);
    let samples = Grid::from_fn(w, h, |x, y| {
        let t = theta0 + ax * x as f64 + ay * y as f64;
        let psi = psi0 * (1.0 + 0.3 * (0.2 * x as f64).sin() * (0.15 * y as f64).cos());
        MetricSample::new(Tensor2::from_eigen([t.cos(), t.sin()], l1, l2), omega, psi).unwrap()
    });
    MetricField::new(samples, Mask::new(w, h, true)).unwrap()
}

fn voronoi_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (mut agree, mut total) = (0usize, 0usize);
    let mut worst = 1.0f64;
    for _ in 0..20 {
        let (w, h) = (rng.gen_range(16..=48), rng.gen_range(16..=48));
        let n = rng.gen_range(2..=4);
        let mut taken = Mask::new(w, h, false);
        let mut sources = Vec::new();
        for _ in 0..n {
            let mut pts = Vec::new();
            for _ in 0..rng.gen_range(1..=3) {
                loop {
                    let p = Pixel::new(rng.gen_range(0..w), rng.gen_range(0..h));
                    if !taken.get(p.x, p.y) {
                        taken.set(p.x, p.y, true);
                        pts.push(p);
                        break;
                    }
                }
            }
            sources.push(pts);
        }
        let metrics: Vec<MetricField> = (0..n).map(|_| random_metric(&mut rng, w, h)).collect();
        let bound = metrics.iter().map(MetricField::anisotropy_bound).fold(1.0, f64::max);
        let stencil = Stencil::from_anisotropy(bound);
        let full = Mask::new(w, h, true);
        let vd = voronoi_from_fronts(&sources, &metrics, &vec![full.clone(); n], &stencil).unwrap();
        let independent: Vec<_> = (0..n)
            .map(|i| fmm_unconstrained(&sources[i], &metrics[i], &full, &stencil).unwrap())
            .collect();
        let (mut a, mut t) = (0usize, 0usize);
        for idx in 0..w * h {
            let mut ds: Vec<(f64, u32)> = independent
                .iter()
                .enumerate()
                .map(|(i, d)| (d.data()[idx], i as u32 + 1))
                .collect();
            ds.sort_by(|x, y| x.0.total_cmp(&y.0));
            if ds[1].0 - ds[0].0 <= 1e-6 {
                continue;
            }
            t += 1;
            a += (vd.index.data()[idx] == ds[0].1) as usize;
        }
        worst = worst.min(a as f64 / t as f64);
        agree += a;
        total += t;
    }
    let rate = agree as f64 / total as f64;
    ensure(rate >= 0.99, || format!("agreement {:.2}% of {total} pixels", 100.0 * rate))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "agreement {:.2}% of {total} tie-free pixels (lowest single instance {:.2}%)",
        100.0 * rate,
        100.0 * worst
    ))
}

fn hausdorff(a: &Mask, b: &Mask) -> f64 {
    let (pa, pb) = (a.pixels(), b.pixels());
    let directed = |from: &[Pixel], to: &[Pixel]| {
        from.iter()
            .map(|p| to.iter().map(|q| p.dist2(q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
            .sqrt()
    };
    directed(&pa, &pb).max(directed(&pb, &pa))
}

fn symmetric_bisector() -> Outcome {
    let start = Instant::now();
    let img = ImageGrid::constant(64, 64, 1, 0.5).unwrap();
    let cfg = DualFrontConfig {
        mu: 0.0,
        single_metric_mode: true,
        ..Default::default()
    };
    let labels = init_labels(&[Shape::Circle { cx: 32.0, cy: 30.0, r: 15.0 }], 64, 64).unwrap();
    let (next, _) = evolve_step(&labels, &img, &cfg).unwrap();
    let moved = hausdorff(&boundary_mask(&labels), &boundary_mask(&next));
    ensure(moved <= 1.0, || format!("interface moved {moved:.2} px"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("interface displacement {moved:.2} px"))
}

fn synthetic_segmentation() -> Outcome {
    let start = Instant::now();
    let (img, gt) = make_synthetic(SyntheticShape::Appendage, 128, 128, 0.1, 7).unwrap();
    let mut cfg = BenchmarkConfig {
        runs: 20,
        record_timing: false,
        ..Default::default()
    };
    cfg.dual.model = RegionModelKind::Gmm { components: 2 };
    let report = benchmark(
        "appendage",
        &img,
        &gt,
        &[Method::Asymmetric, Method::Symmetric],
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    let asym = report.scores(Method::Asymmetric);
    let sym = report.scores(Method::Symmetric);
    let amin = asym.iter().cloned().fold(f64::INFINITY, f64::min);
    let smin = sym.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = sym.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ensure(asym.len() == 20 && amin >= 0.95, || {
        format!("asymmetric minimum Jaccard {amin:.4}")
    })?;
    ensure(smin <= 0.90, || format!("symmetric minimum Jaccard {smin:.4}"))?;
    within(start.elapsed(), 180.0)?;
    Ok(format!(
        "asymmetric min {amin:.4} (ave {:.4}); symmetric range {smin:.4}..{smax:.4}",
        report.summary(Method::Asymmetric).unwrap().ave
    ))
}

fn convergence_ordering() -> Outcome {
    let start = Instant::now();
    let (img, gt) = make_synthetic(SyntheticShape::Disk, 64, 64, 0.0, 0).unwrap();
    let labels = init_labels(&[Shape::Circle { cx: 31.5, cy: 31.5, r: 6.0 }], 64, 64).unwrap();
    let trace = |mu: f64, ell: f64| {
        let cfg = DualFrontConfig {
            mu,
            ell,
            ..Default::default()
        };
        run(&labels, &img, &cfg, Some(&gt)).unwrap().1
    };
    let (asym, sym) = (trace(5.0, 10.0), trace(0.0, 10.0));
    ensure(asym.len() <= sym.len(), || {
        format!("mu=5 took {} iterations, mu=0 took {}", asym.len(), sym.len())
    })?;
    let wide = asym.iterations_to_reach(0.95);
    let narrow = trace(5.0, 5.0).iterations_to_reach(0.95);
    let (Some(wide), Some(narrow)) = (wide, narrow) else {
        return Err(format!("0.95 not reached: ell=10 {wide:?}, ell=5 {narrow:?}"));
    };
    ensure(wide <= narrow, || format!("ell=10 needs {wide}, ell=5 needs {narrow}"))?;
    within(start.elapsed(), 120.0)?;
    Ok(format!(
        "iterations mu=5: {}, mu=0: {}; steps to J>=0.95 ell=10: {wide}, ell=5: {narrow}",
        asym.len(),
        sym.len()
    ))
}

fn split_image(gap: f64) -> (ImageGrid, LabelMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let field = Grid::from_fn(64, 32, |x, _| {
        let m = if x < 32 { 0.5 - gap / 2.0 } else { 0.5 + gap / 2.0 };
        (m + noise.sample(&mut rng)).clamp(0.0, 1.0)
    });
    let labels = LabelMap::new(Grid::from_fn(64, 32, |x, _| if x < 32 { 1 } else { 2 })).unwrap();
    (ImageGrid::from_gray(&field).unwrap(), labels)
}

fn region_models() -> Outcome {
    let start = Instant::now();
    let monotone = |h: &[f64]| h.windows(2).all(|w| w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0));
    let mut fits = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let noise = Normal::new(0.0, 0.06).unwrap();
    for trial in 0..40 {
        let dim = if trial % 2 == 0 { 1 } else { 3 };
        let k = 1 + trial % 4;
        let centres: Vec<f64> = (0..3 * dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        let data: Vec<f64> = (0..300 * dim)
            .map(|i| centres[((i / dim) % 3) * dim + i % dim] + noise.sample(&mut rng))
            .collect();
        let (_, history) = fit_mixture(&data, dim, k, 20, None, &mut rng).map_err(|e| e.to_string())?;
        ensure(monotone(&history), || format!("trial {trial}: {history:?}"))?;
        fits += 1;
    }
    let (img, _) = make_synthetic(SyntheticShape::Appendage, 96, 96, 0.1, 3).unwrap();
    let labels = init_labels(&[Shape::Circle { cx: 36.0, cy: 48.0, r: 12.0 }], 96, 96).unwrap();
    let first = fit_region_mixtures(&img, &labels, 2, 15, 0, None).map_err(|e| e.to_string())?;
    let warm = fit_region_mixtures(&img, &labels, 2, 15, 0, Some(&first.mixtures)).map_err(|e| e.to_string())?;
    for h in first.log_likelihood.iter().chain(&warm.log_likelihood) {
        ensure(monotone(h), || format!("region fit: {h:?}"))?;
        fits += 1;
    }

    let mut prev = f64::INFINITY;
    let mut sweep = Vec::new();
    for gap in [0.0, 0.05, 0.1, 0.2, 0.4] {
        let (img, labels) = split_image(gap);
        let h = region_histograms(&img, &labels, 2.0, 64).map_err(|e| e.to_string())?;
        let b = bhattacharyya_coefficient(&h[0], &h[1]);
        let same = bhattacharyya_coefficient(&h[1], &h[1]);
        ensure((0.0..=1.0).contains(&b), || format!("coefficient {b} outside [0, 1]"))?;
        ensure((same - 1.0).abs() <= 1e-9, || format!("identical histograms give {same}"))?;
        ensure(b < prev, || format!("coefficient rose to {b} at separation {gap}"))?;
        prev = b;
        sweep.push(format!("{b:.3}"));
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "{fits} EM fits monotone; coefficient sweep [{}]",
        sweep.join(", ")
    ))
}

fn geofront_bin(args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_geofront"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || {
        format!("geofront {args:?}: {}", String::from_utf8_lossy(&o.stderr))
    })
}

fn runtime_budget() -> Outcome {
    let (img, _) = make_synthetic(SyntheticShape::MultiLobe, 481, 321, 0.05, 2).unwrap();
    let labels = init_labels(&[Shape::Circle { cx: 240.0, cy: 160.0, r: 60.0 }], 481, 321).unwrap();
    let start = Instant::now();
    let (_, record) = evolve_step(&labels, &img, &DualFrontConfig::default()).map_err(|e| e.to_string())?;
    let step = start.elapsed().as_secs_f64();
    ensure(step <= 2.0, || format!("step took {step:.2}s"))?;

    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let out = dir.path().join("bench");
    let start = Instant::now();
    geofront_bin(&[
        "benchmark", "--synthetic", "disk", "--size", "64x64", "--runs", "20",
        "--out", out.to_str().unwrap(),
    ])?;
    let bench = start.elapsed().as_secs_f64();
    ensure(bench <= 60.0, || format!("benchmark took {bench:.1}s"))?;
    Ok(format!(
        "481x321 step {step:.2}s ({} band pixels, stencil radius {}); R=20 benchmark {bench:.1}s",
        record.band_pixels, record.stencil_radius
    ))
}

fn same_files(a: &Path, b: &Path, names: &[&str]) -> Result<(), String> {
    for n in names {
        let x = fs::read(a.join(n)).map_err(|e| format!("{n}: {e}"))?;
        let y = fs::read(b.join(n)).map_err(|e| format!("{n}: {e}"))?;
        ensure(x == y, || format!("{n} differs between invocations"))?;
    }
    Ok(())
}

fn determinism() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let (img, gt) = make_synthetic(SyntheticShape::Appendage, 64, 64, 0.1, 4).unwrap();
    let bytes: Vec<u8> = img.data().iter().map(|v| (v * 255.0).round() as u8).collect();
    let img_path = dir.path().join("image.png");
    GrayImage::from_raw(64, 64, bytes).unwrap().save(&img_path).map_err(|e| e.to_string())?;
    let gt_path = dir.path().join("gt.png");
    geofront_cli::io::write_mask(&gt_path, &gt).map_err(|e| e.to_string())?;
    let (ip, gp) = (img_path.to_str().unwrap(), gt_path.to_str().unwrap());

    for run in ["a", "b"] {
        let out = dir.path().join(format!("seg-{run}"));
        geofront_bin(&[
            "segment", "--image", ip, "--gt", gp, "--init", "circle:24,32,6", "--set", "model=gmm:2",
            "--seed", "17", "--no-timing", "--out", out.to_str().unwrap(),
        ])?;
        let out = dir.path().join(format!("bench-{run}"));
        geofront_bin(&[
            "benchmark", "--image", ip, "--gt", gp, "--runs", "3", "--radius", "6", "--set",
            "model=gmm:2", "--seed", "17", "--no-timing", "--out", out.to_str().unwrap(),
        ])?;
    }
    same_files(
        &dir.path().join("seg-a"),
        &dir.path().join("seg-b"),
        &["labels.png", "overlay.png", "trace.csv", "metrics.json"],
    )?;
    same_files(
        &dir.path().join("bench-a"),
        &dir.path().join("bench-b"),
        &["report.csv", "report.json"],
    )?;
    Ok("segment and benchmark outputs byte-identical across invocations".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("metric axioms", metric_axioms),
        ("isotropic solver accuracy", isotropic_accuracy),
        ("asymmetry direction", asymmetry_direction),
        ("voronoi oracle equivalence", voronoi_oracle),
        ("symmetric bisector", symmetric_bisector),
        ("synthetic segmentation", synthetic_segmentation),
        ("convergence ordering", convergence_ordering),
        ("region models", region_models),
        ("runtime budget", runtime_budget),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name} [{secs:.2}s]: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{secs:.2}s]: {reason}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
