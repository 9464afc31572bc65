use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Grid, LabelMap, Mask};

/// Initial region shape. Rectangle corners are inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Circle { cx: f64, cy: f64, r: f64 },
    Rect { x0: usize, y0: usize, x1: usize, y1: usize },
}

impl Shape {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        match *self {
            Shape::Circle { cx, cy, r } => {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                dx * dx + dy * dy <= r * r
            }
            Shape::Rect { x0, y0, x1, y1 } => (x0..=x1).contains(&x) && (y0..=y1).contains(&y),
        }
    }

    pub fn rasterize(&self, width: usize, height: usize) -> Mask {
        Grid::from_fn(width, height, |x, y| self.contains(x, y))
    }

    fn check(&self, width: usize, height: usize) -> Result<()> {
        let inside = match *self {
            Shape::Circle { cx, cy, r } => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "circle radius must be positive, got {r}"
                    )));
                }
                cx - r >= 0.0
                    && cy - r >= 0.0
                    && cx + r <= width as f64 - 1.0
                    && cy + r <= height as f64 - 1.0
            }
            Shape::Rect { x0, y0, x1, y1 } => {
                if x0 > x1 || y0 > y1 {
                    return Err(Error::InvalidParameter(format!(
                        "rectangle corners out of order: {self}"
                    )));
                }
                x1 < width && y1 < height
            }
        };
        if !inside {
            return Err(Error::InvalidParameter(format!(
                "shape {self} exceeds the {width}x{height} grid"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Circle { cx, cy, r } => write!(f, "circle:{cx},{cy},{r}"),
            Shape::Rect { x0, y0, x1, y1 } => write!(f, "rect:{x0},{y0},{x1},{y1}"),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    /// `circle:cx,cy,r` or `rect:x0,y0,x1,y1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse shape '{s}'"));
        let (kind, args) = s.trim().split_once(':').ok_or_else(bad)?;
        let nums: Vec<&str> = args.split(',').map(str::trim).collect();
        match (kind.trim(), nums.len()) {
            ("circle", 3) => {
                let v: Vec<f64> = nums
                    .iter()
                    .map(|n| n.parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<_>>()?;
                Ok(Shape::Circle {
                    cx: v[0],
                    cy: v[1],
                    r: v[2],
                })
            }
            ("rect", 4) => {
                let v: Vec<usize> = nums
                    .iter()
                    .map(|n| n.parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<_>>()?;
                Ok(Shape::Rect {
                    x0: v[0],
                    y0: v[1],
                    x1: v[2],
                    y1: v[3],
                })
            }
            _ => Err(bad()),
        }
    }
}

/// Parses a `;`-separated shape list.
pub fn parse_shapes(s: &str) -> Result<Vec<Shape>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Background region 1 plus one region per shape, numbered from 2 in order.
pub fn init_labels(shapes: &[Shape], width: usize, height: usize) -> Result<LabelMap> {
    if shapes.is_empty() {
        return Err(Error::InvalidParameter("at least one shape is required".into()));
    }
    let mut g = Grid::new(width, height, 1u32);
    let mut owner: Grid<usize> = Grid::new(width, height, usize::MAX);
    for (k, shape) in shapes.iter().enumerate() {
        shape.check(width, height)?;
        let mut any = false;
        for y in 0..height {
            for x in 0..width {
                if shape.contains(x, y) {
                    let prev = *owner.get(x, y);
                    if prev != usize::MAX {
                        return Err(Error::OverlappingShapes(prev, k));
                    }
                    owner.set(x, y, k);
                    g.set(x, y, k as u32 + 2);
                    any = true;
                }
            }
        }
        if !any {
            return Err(Error::InvalidParameter(format!("shape {shape} covers no pixel")));
        }
    }
    LabelMap::new(g).map_err(|_| Error::InvalidParameter("shapes leave no background".into()))
}
