use crate::error::{Error, Result};

/// Ring of primitive integer offsets with ∞-norm at most `radius`, sorted
/// counter-clockwise from the positive x axis. Consecutive offsets (and the
/// last with the first) form unit-determinant simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stencil {
    radius: u32,
    offsets: Vec<[i64; 2]>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Stencil {
    pub fn ring(radius: u32) -> Result<Stencil> {
        if radius == 0 {
            return Err(Error::InvalidParameter("stencil radius must be >= 1".into()));
        }
        let r = radius as i64;
        let mut offsets: Vec<[i64; 2]> = (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| [dx, dy]))
            .filter(|&[dx, dy]| (dx, dy) != (0, 0) && gcd(dx, dy) == 1)
            .collect();
        offsets.sort_by(|a, b| {
            let ta = (a[1] as f64).atan2(a[0] as f64).rem_euclid(std::f64::consts::TAU);
            let tb = (b[1] as f64).atan2(b[0] as f64).rem_euclid(std::f64::consts::TAU);
            ta.total_cmp(&tb)
        });
        Ok(Stencil { radius, offsets })
    }

    /// Radius 1 for bounds up to 2, radius 2 up to 6, radius 3 beyond.
    pub fn from_anisotropy(bound: f64) -> Stencil {
        let r = if bound <= 2.0 {
            1
        } else if bound <= 6.0 {
            2
        } else {
            3
        };
        Stencil::ring(r).expect("positive radius")
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn offsets(&self) -> &[[i64; 2]] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Consecutive offset pairs `(v_k, v_{k+1})`, wrapping around.
    pub fn simplices(&self) -> impl Iterator<Item = ([i64; 2], [i64; 2])> + '_ {
        let n = self.offsets.len();
        (0..n).map(move |k| (self.offsets[k], self.offsets[(k + 1) % n]))
    }
}
