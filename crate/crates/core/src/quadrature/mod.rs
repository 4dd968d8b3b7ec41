//! Deterministic numerical integration used by every other module.
//!
//! * [`integrate_1d`] / [`integrate_1d_with`]: adaptive Gauss–Kronrod over an
//!   interval, optionally pre-split at declared breakpoints.
//! * [`integrate_2d`] / [`integrate_2d_with`]: iterated adaptive integration over a
//!   rectangle. Inner integrals for one outer panel run concurrently, but the
//!   outer subdivision tree and summation order are fixed, so the value is
//!   bit-for-bit reproducible.
//! * [`integrate_pv`]: Cauchy principal values by symmetric excision with
//!   Richardson extrapolation.
//! * [`improper_dyadic`]: integrals toward an endpoint singularity, summed over
//!   dyadic shells and classified as convergent, divergent or inconclusive.

mod dyadic;
mod kronrod;
mod legendre;
mod pv;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use kronrod::Sample;

pub use dyadic::{
    classify_shells, dyadic_shells, improper_dyadic, improper_dyadic_with, DyadicOptions, IntegralVerdict,
    ShellTerm, VerdictKind,
};
pub use legendre::{gauss_legendre, TensorRule};
pub use pv::{integrate_pv, integrate_pv_with};

pub const DEFAULT_TOL_1D: f64 = 1e-8;
pub const DEFAULT_TOL_2D: f64 = 1e-6;
pub const DEFAULT_MAX_EVALS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn zero() -> Self {
        QuadratureResult {
            value: Complex64::new(0.0, 0.0),
            abs_error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Absolute tolerance.
    pub tol: f64,
    /// Relative tolerance; the effective target is `max(tol, rel_tol * |value|)`.
    pub rel_tol: f64,
    /// Cap on integrand evaluations (nested evaluations included).
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: DEFAULT_TOL_1D,
            rel_tol: 0.0,
            max_evals: DEFAULT_MAX_EVALS,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions { tol, ..Default::default() }
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn square(center: Complex64, half_side: f64) -> Self {
        Rect::new(center.re - half_side, center.re + half_side, center.im - half_side, center.im + half_side)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn is_valid(&self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.y0.is_finite() && self.y1.is_finite() && self.x0 < self.x1 && self.y0 < self.y1
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    pub fn translate(&self, dz: Complex64) -> Rect {
        Rect::new(self.x0 + dz.re, self.x1 + dz.re, self.y0 + dz.im, self.y1 + dz.im)
    }

    /// Intersection, or `None` when the interiors are disjoint.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let r = Rect::new(self.x0.max(other.x0), self.x1.min(other.x1), self.y0.max(other.y0), self.y1.min(other.y1));
        r.is_valid().then_some(r)
    }

    /// `max(|x - a|)` over the rectangle's corners in the sup norm.
    pub fn sup_distance(&self, p: Complex64) -> f64 {
        let dx = (self.x0 - p.re).abs().max((self.x1 - p.re).abs());
        let dy = (self.y0 - p.im).abs().max((self.y1 - p.im).abs());
        dx.max(dy)
    }
}

/// Sorted, de-duplicated interior breakpoints plus the two endpoints.
pub(crate) fn breakpoints(a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = extra.iter().copied().filter(|&x| x > a && x < b && x.is_finite()).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(b);
    pts
}

pub fn integrate_1d<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_1d_with(f, a, b, &[], &QuadOptions::with_tol(tol))
}

/// Adaptive integration over `[a, b]`, pre-split at `breaks` (points outside the
/// open interval are ignored).
pub fn integrate_1d_with<F>(f: F, a: f64, b: f64, breaks: &[f64], opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(a < b) {
        return Err(Error::invalid(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    let pts = breakpoints(a, b, breaks);
    kronrod::adaptive(
        |xs: &[f64]| Ok(xs.iter().map(|&x| Sample::plain(f(x))).collect()),
        &pts,
        opts,
    )
}

pub fn integrate_2d<F>(f: F, rect: Rect, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    integrate_2d_with(f, rect, &[], &[], &QuadOptions::with_tol(tol))
}

/// Iterated adaptive integration over `rect`.
///
/// `x_breaks` and `y_breaks` declare the lines on which the integrand may be
/// singular or non-smooth; every panel edge falls on them, so point
/// singularities sit at panel corners and are never sampled.
pub fn integrate_2d_with<F>(
    f: F,
    rect: Rect,
    x_breaks: &[f64],
    y_breaks: &[f64],
    opts: &QuadOptions,
) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    if !rect.is_valid() {
        return Err(Error::invalid(format!("degenerate integration rectangle {rect:?}")));
    }
    let xs = breakpoints(rect.x0, rect.x1, x_breaks);
    let ys = breakpoints(rect.y0, rect.y1, y_breaks);
    let inner_opts = QuadOptions {
        tol: 0.1 * opts.tol / rect.height(),
        rel_tol: 0.1 * opts.rel_tol,
        max_evals: opts.max_evals,
    };
    let inner = |y: f64| -> Result<Sample> {
        let r = kronrod::adaptive(
            |nodes: &[f64]| Ok(nodes.iter().map(|&x| Sample::plain(f(x, y))).collect()),
            &xs,
            &inner_opts,
        )?;
        Ok(Sample {
            value: r.value,
            err: r.abs_error_estimate,
            evals: r.evaluations,
        })
    };
    kronrod::adaptive(
        |nodes: &[f64]| nodes.par_iter().map(|&y| inner(y)).collect::<Result<Vec<_>>>(),
        &ys,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn polynomial() {
        let r = integrate_1d(|x| c(x * x), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.converged);
        assert!(r.abs_error_estimate <= 1e-12);
    }

    #[test]
    fn zero_integrand() {
        let r = integrate_1d(|_| c(0.0), 0.0, 1.0, 1e-8).unwrap();
        assert_eq!(r.value, c(0.0));
        assert!(r.converged);
    }

    #[test]
    fn endpoint_singularity_with_log() {
        // -t^a ln t / a + t^a / a^2 with a = 1/2
        let expected = (0.5f64).sqrt() * (4.0 + 2.0 * LN_2);
        let r = integrate_1d(|t| c(t.powf(-0.5) * (1.0 / t).ln()), 0.0, 0.5, 1e-10).unwrap();
        assert!((r.value.re - expected).abs() < 1e-9, "{} vs {}", r.value.re, expected);
        assert!((expected - 3.8086853).abs() < 1e-7);
    }

    #[test]
    fn complex_valued() {
        let r = integrate_1d(|t| Complex64::new(0.0, t).exp(), 0.0, PI, 1e-12).unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn reversed_bounds_rejected() {
        assert!(matches!(integrate_1d(|x| c(x), 1.0, 0.0, 1e-8), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn unit_square() {
        let r = integrate_2d(|_, _| c(1.0), Rect::new(0.0, 1.0, 0.0, 1.0), 1e-10).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_over_symmetric_square() {
        // |y| / (x^2 + y^2) over [-1, 1]^2 = pi + 2 ln 2
        let r = integrate_2d_with(
            |x, y| c(y.abs() / (x * x + y * y)),
            Rect::new(-1.0, 1.0, -1.0, 1.0),
            &[0.0],
            &[0.0],
            &QuadOptions::with_tol(1e-8),
        )
        .unwrap();
        assert!((r.value.re - (PI + 2.0 * LN_2)).abs() < 1e-7, "{}", r.value.re);
    }

    #[test]
    fn inverse_radius() {
        // (x^2 + y^2)^(-1/2) over [0, 1]^2 = 2 ln(1 + sqrt 2)
        let expected = 2.0 * (1.0 + 2f64.sqrt()).ln();
        let r = integrate_2d(|x, y| c((x * x + y * y).sqrt().recip()), Rect::new(0.0, 1.0, 0.0, 1.0), 1e-8).unwrap();
        assert!((r.value.re - expected).abs() < 1e-7, "{}", r.value.re);
        assert!(r.abs_error_estimate < 1e-7);
    }

    #[test]
    fn two_dimensional_is_reproducible() {
        let f = |x: f64, y: f64| Complex64::new((x * y).sin(), (x + y).cos()) / (1.0 + x * x + y * y).sqrt();
        let a = integrate_2d(f, Rect::new(-2.0, 1.0, -1.0, 3.0), 1e-9).unwrap();
        let b = integrate_2d(f, Rect::new(-2.0, 1.0, -1.0, 3.0), 1e-9).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }
}
