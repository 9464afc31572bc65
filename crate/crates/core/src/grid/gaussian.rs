use super::{Grid, ScalarField};

/// Normalized 1-D Gaussian taps over `[-⌈3σ⌉, ⌈3σ⌉]`. `σ = 0` gives `[1.0]`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Separable Gaussian blur with edge replication.
pub fn gaussian_convolve(field: &ScalarField, sigma: f64) -> ScalarField {
    if sigma <= 0.0 {
        return field.clone();
    }
    let taps = gaussian_kernel(sigma);
    let r = (taps.len() / 2) as i64;
    let (w, h) = field.dims();
    let src = field.data();

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                let xx = (x as i64 + k as i64 - r).clamp(0, w as i64 - 1) as usize;
                acc += t * row[xx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for (k, t) in taps.iter().enumerate() {
            let yy = (y as i64 + k as i64 - r).clamp(0, h as i64 - 1) as usize;
            let src_row = &tmp[yy * w..(yy + 1) * w];
            let dst_row = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst_row.iter_mut().zip(src_row) {
                *d += t * s;
            }
        }
    }
    Grid::from_vec(w, h, out).expect("dims preserved")
}
