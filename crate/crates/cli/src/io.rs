//! Image, label-map and field-dump I/O.
//!
//! Field dumps use the FGRID format: an ASCII line `FGRID v1 <width>
//! <height>` followed by the values in row-major order as little-endian
//! 64-bit floats. Unreached pixels are stored as IEEE `+∞`.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use geofront::grid::boundary_mask;
use geofront::{Grid, ImageGrid, LabelMap, Mask, ScalarField};
use image::{DynamicImage, GrayImage, Rgb, RgbImage};

use crate::CliError;

fn open(path: &Path) -> Result<DynamicImage, CliError> {
    image::open(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))
}

/// Reads an 8-bit gray or colour image, scaling intensities to `[0, 1]`.
pub fn read_image(path: &Path) -> Result<ImageGrid, CliError> {
    let img = open(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let grid = if img.color().has_color() {
        let data = img.to_rgb8().into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
        ImageGrid::new(w, h, 3, data)
    } else {
        let data = img.to_luma8().into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
        ImageGrid::new(w, h, 1, data)
    };
    grid.map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

/// Reads a binary mask: every nonzero gray level is foreground.
pub fn read_mask(path: &Path) -> Result<Mask, CliError> {
    let img = open(path)?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = img.into_raw().into_iter().map(|v| v > 0).collect();
    Grid::from_vec(w, h, data).map_err(|e| CliError::Runtime(e.to_string()))
}

fn save_gray(path: &Path, w: usize, h: usize, data: Vec<u8>) -> Result<(), CliError> {
    GrayImage::from_raw(w as u32, h as u32, data)
        .expect("buffer matches dimensions")
        .save(path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn write_mask(path: &Path, mask: &Mask) -> Result<(), CliError> {
    let (w, h) = mask.dims();
    save_gray(path, w, h, mask.data().iter().map(|&b| if b { 255 } else { 0 }).collect())
}

/// Gray level of region `l` out of `n`: `round(255 (l - 1) / (n - 1))`.
pub fn label_level(l: u32, n: u32) -> u8 {
    if n <= 1 {
        0
    } else {
        (255.0 * (l - 1) as f64 / (n - 1) as f64).round() as u8
    }
}

/// Writes one gray level per region, evenly spread over `0..=255`.
pub fn write_labels(path: &Path, labels: &LabelMap) -> Result<(), CliError> {
    let n = labels.count();
    if n > 256 {
        return Err(CliError::Runtime(format!(
            "{n} regions do not fit in an 8-bit label image"
        )));
    }
    let (w, h) = labels.dims();
    save_gray(path, w, h, labels.data().iter().map(|&l| label_level(l, n)).collect())
}

/// Reads a label image: the distinct gray levels, in increasing order,
/// become regions `1, 2, …`.
pub fn read_labels(path: &Path) -> Result<LabelMap, CliError> {
    let img = open(path)?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let raw = img.into_raw();
    let mut rank = [0u32; 256];
    let mut present = [false; 256];
    raw.iter().for_each(|&v| present[v as usize] = true);
    let mut next = 0;
    for (v, p) in present.iter().enumerate() {
        if *p {
            next += 1;
            rank[v] = next;
        }
    }
    LabelMap::from_vec(w, h, raw.iter().map(|&v| rank[v as usize]).collect())
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

/// Input image with the region contours painted red. A contour pixel is a
/// pixel with a 4-neighbour of lower label, so each interface is drawn once.
pub fn write_overlay(path: &Path, image: &ImageGrid, labels: &LabelMap) -> Result<(), CliError> {
    let (w, h) = image.dims();
    let contour = contour_mask(labels);
    let mut out = RgbImage::new(w as u32, h as u32);
    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;
            let px = if *contour.get(x, y) {
                Rgb([255, 0, 0])
            } else {
                let v = image.value(idx);
                let to8 = |c: f64| (c * 255.0).round().clamp(0.0, 255.0) as u8;
                if v.len() == 3 {
                    Rgb([to8(v[0]), to8(v[1]), to8(v[2])])
                } else {
                    Rgb([to8(v[0]); 3])
                }
            };
            out.put_pixel(x as u32, y as u32, px);
        }
    }
    out.save(path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Pixels drawn as contour by [`write_overlay`].
pub fn contour_mask(labels: &LabelMap) -> Mask {
    let g = labels.grid();
    let mut m = boundary_mask(labels);
    for (idx, on) in m.data_mut().iter_mut().enumerate() {
        if *on {
            let l = g.data()[idx];
            *on = g.neighbors4(idx).any(|n| g.data()[n] < l);
        }
    }
    m
}

pub fn write_fgrid(path: &Path, field: &ScalarField) -> Result<(), CliError> {
    let (w, h) = field.dims();
    let mut buf = format!("FGRID v1 {w} {h}\n").into_bytes();
    buf.reserve(8 * w * h);
    for v in field.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::File::create(path)
        .and_then(|mut f| f.write_all(&buf))
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn read_fgrid(path: &Path) -> Result<ScalarField, CliError> {
    let bad = |msg: &str| CliError::Runtime(format!("{}: {msg}", path.display()));
    let file = fs::File::open(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = BufReader::new(file);
    let mut header = String::new();
    reader.read_line(&mut header).map_err(|_| bad("missing header"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let (w, h) = match parts.as_slice() {
        ["FGRID", "v1", w, h] => (
            w.parse::<usize>().map_err(|_| bad("bad width"))?,
            h.parse::<usize>().map_err(|_| bad("bad height"))?,
        ),
        _ => return Err(bad("not an FGRID v1 file")),
    };
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes).map_err(|_| bad("truncated data"))?;
    if bytes.len() != 8 * w * h {
        return Err(bad("data length does not match the header"));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Grid::from_vec(w, h, data).map_err(|e| CliError::Runtime(e.to_string()))
}
