//! Dyadic Whitney cubes of `ℂ ∖ ℝ`.
//!
//! Generation `n` is the layer `2^-n <= |Im z| < 2^-n+1` cut into columns
//! `[j 2^-n, (j + 1) 2^-n)`, so every cube's side equals its distance to ℝ.
//! All coordinates are dyadic rationals and therefore exact in `f64`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Rect;

pub const MAX_GENERATION: i32 = 40;
const MIN_GENERATION: i32 = -1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    fn sign(self) -> f64 {
        match self {
            HalfPlane::Upper => 1.0,
            HalfPlane::Lower => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCube {
    pub center: Complex64,
    pub side: f64,
    pub generation: i32,
    pub half_plane: HalfPlane,
}

impl WhitneyCube {
    fn new(generation: i32, column: i64, half_plane: HalfPlane) -> Self {
        let side = 2f64.powi(-generation);
        let cy = half_plane.sign() * 1.5 * side;
        WhitneyCube {
            center: Complex64::new((column as f64 + 0.5) * side, cy),
            side,
            generation,
            half_plane,
        }
    }

    pub fn bounds(&self) -> Rect {
        Rect::square(self.center, 0.5 * self.side)
    }

    /// Distance from the cube to ℝ, equal to the side.
    pub fn dist_to_real(&self) -> f64 {
        self.center.im.abs() - 0.5 * self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    /// Membership with the half-open convention used to build the tiling.
    pub fn contains(&self, z: Complex64) -> bool {
        let b = self.bounds();
        let y = z.im.abs();
        let in_y = y >= self.side && y < 2.0 * self.side;
        let right_sign = (z.im > 0.0) == (self.half_plane == HalfPlane::Upper);
        right_sign && in_y && z.re >= b.x0 && z.re < b.x1
    }
}

fn generation_of(height: f64) -> i32 {
    let mut n = (-height.log2()).ceil() as i32;
    // correct for rounding in log2 so that 2^-n <= height < 2^-n+1 exactly
    while 2f64.powi(-n) > height {
        n += 1;
    }
    while 2f64.powi(-n + 1) <= height {
        n -= 1;
    }
    n
}

/// The cube containing `z`.
pub fn cube_containing(z: Complex64) -> Result<WhitneyCube> {
    if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::invalid(format!("{z} is not in the complement of the real line")));
    }
    let n = generation_of(z.im.abs());
    if n > MAX_GENERATION {
        return Err(Error::GenerationOverflow(n));
    }
    let side = 2f64.powi(-n);
    let column = (z.re / side).floor() as i64;
    let hp = if z.im > 0.0 { HalfPlane::Upper } else { HalfPlane::Lower };
    Ok(WhitneyCube::new(n, column, hp))
}

/// Cubes whose interiors meet `strip ∩ {|Im z| >= 2^-max_generation}`, ordered by
/// half-plane, generation and column.
pub fn whitney_decompose(strip: Rect, max_generation: i32) -> Result<Vec<WhitneyCube>> {
    if max_generation > MAX_GENERATION {
        return Err(Error::GenerationOverflow(max_generation));
    }
    if !strip.is_valid() {
        return Err(Error::invalid(format!("strip {strip:?} is degenerate")));
    }
    let floor = 2f64.powi(-max_generation);
    let mut cubes = Vec::new();
    for hp in [HalfPlane::Upper, HalfPlane::Lower] {
        let (lo, hi) = match hp {
            HalfPlane::Upper => (strip.y0.max(0.0), strip.y1),
            HalfPlane::Lower => ((-strip.y1).max(0.0), -strip.y0),
        };
        let lo = lo.max(floor);
        if !(lo < hi) {
            continue;
        }
        let first = generation_of(hi).max(MIN_GENERATION) - 1;
        for n in first..=max_generation {
            let side = 2f64.powi(-n);
            let (a, b) = (side, 2.0 * side);
            if !(a < hi && b > lo) {
                continue;
            }
            let j0 = (strip.x0 / side).floor() as i64;
            let j1 = (strip.x1 / side).ceil() as i64;
            for j in j0..j1 {
                let (x0, x1) = (j as f64 * side, (j + 1) as f64 * side);
                if x0 < strip.x1 && x1 > strip.x0 {
                    cubes.push(WhitneyCube::new(n, j, hp));
                }
            }
        }
    }
    Ok(cubes)
}

/// Writes `center_re,center_im,side,generation` rows.
pub fn write_cubes_csv<W: Write>(cubes: &[WhitneyCube], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["center_re", "center_im", "side", "generation"])?;
    for c in cubes {
        w.write_record(&[
            c.center.re.to_string(),
            c.center.im.to_string(),
            c.side.to_string(),
            c.generation.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A dyadic annular sector near the unit circle: `2^-n <= |r - 1| < 2^-n+1`,
/// angles `[2π k / 2^{n+3}, 2π (k + 1) / 2^{n+3})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularSector {
    pub generation: i32,
    pub index: i64,
    pub exterior: bool,
    pub r_min: f64,
    pub r_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl AnnularSector {
    pub fn center(&self) -> Complex64 {
        Complex64::from_polar(0.5 * (self.r_min + self.r_max), 0.5 * (self.theta_min + self.theta_max))
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.r_max * self.r_max - self.r_min * self.r_min) * (self.theta_max - self.theta_min)
    }

    /// Radial thickness, equal to the distance to the circle.
    pub fn side(&self) -> f64 {
        self.r_max - self.r_min
    }
}

/// Sectors of generations `1..=max_generation` on one side of the unit circle.
pub fn whitney_annulus(max_generation: i32, exterior: bool) -> Result<Vec<AnnularSector>> {
    if max_generation > 20 {
        return Err(Error::GenerationOverflow(max_generation));
    }
    let mut out = Vec::new();
    for n in 1..=max_generation {
        let s = 2f64.powi(-n);
        let (r_min, r_max) = if exterior { (1.0 + s, 1.0 + 2.0 * s) } else { (1.0 - 2.0 * s, 1.0 - s) };
        let count = 1i64 << (n + 3);
        let dtheta = 2.0 * PI / count as f64;
        for k in 0..count {
            out.push(AnnularSector {
                generation: n,
                index: k,
                exterior,
                r_min,
                r_max,
                theta_min: k as f64 * dtheta,
                theta_max: (k + 1) as f64 * dtheta,
            });
        }
    }
    Ok(out)
}
