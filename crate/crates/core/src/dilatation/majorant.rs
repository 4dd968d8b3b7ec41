//! Monotonic majorant `μ*(t) = esssup{|μ(z)| : 0 < |Im z| < t}` by stratified sampling.
//!
//! The strip is cut into layers between consecutive grid heights. Each layer is
//! sampled on `n` abscissa strata times a few log-spaced height strata, plus
//! support corners and points clustered around the field's hot spots. `n`
//! doubles until two successive estimates agree within 1%. Samples accumulate
//! across levels, and the cumulative max over layers gives a nondecreasing
//! estimate. It is a lower bound on the true essential supremum.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DilatationField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantOptions {
    pub seed: u64,
    pub initial_samples: usize,
    pub max_samples: usize,
    pub agreement: f64,
    pub height_strata: usize,
}

impl Default for MajorantOptions {
    fn default() -> Self {
        MajorantOptions {
            seed: 0x5eed_1234,
            initial_samples: 8,
            max_samples: 512,
            agreement: 0.01,
            height_strata: 4,
        }
    }
}

type ExactFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Serialize, Deserialize)]
pub struct MonotonicMajorant {
    /// `(height, estimate)` pairs with increasing height.
    pub samples: Vec<(f64, f64)>,
    pub refinement_depth: usize,
    #[serde(skip)]
    exact: Option<ExactFn>,
}

impl fmt::Debug for MonotonicMajorant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotonicMajorant")
            .field("samples", &self.samples.len())
            .field("refinement_depth", &self.refinement_depth)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl PartialEq for MonotonicMajorant {
    fn eq(&self, other: &Self) -> bool {
        self.samples == other.samples && self.refinement_depth == other.refinement_depth
    }
}

impl MonotonicMajorant {
    /// A majorant given in closed form. `f` must be even and nondecreasing in `|t|`.
    pub fn exact<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        MonotonicMajorant {
            samples: Vec::new(),
            refinement_depth: 0,
            exact: Some(Arc::new(f)),
        }
    }

    pub fn from_samples(samples: Vec<(f64, f64)>, refinement_depth: usize) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0) || w[1].1 < w[0].1) {
            return Err(Error::invalid("majorant samples must have increasing heights and nondecreasing values"));
        }
        Ok(MonotonicMajorant {
            samples,
            refinement_depth,
            exact: None,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_none() && self.samples.iter().all(|s| s.1 == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        if let Some(f) = &self.exact {
            return f(t);
        }
        let s = &self.samples;
        if s.is_empty() {
            return 0.0;
        }
        if t <= s[0].0 {
            return s[0].1;
        }
        let i = s.partition_point(|p| p.0 < t);
        if i >= s.len() {
            return s[s.len() - 1].1;
        }
        let (h0, v0) = s[i - 1];
        let (h1, v1) = s[i];
        if v0 > 0.0 && v1 > 0.0 {
            let w = (t / h0).ln() / (h1 / h0).ln();
            (v0.ln() + w * (v1 / v0).ln()).exp().clamp(v0, v1)
        } else {
            v0 + (v1 - v0) * (t - h0) / (h1 - h0)
        }
    }
}

/// Dyadic heights `top · 2^-k`, `k = 0..=220`, decreasing.
pub fn default_heights(mu: &DilatationField) -> Vec<f64> {
    let top = mu.max_height();
    (0..=220).map(|k| top * 0.5f64.powi(k)).collect()
}

pub fn majorant(mu: &DilatationField, grid: &[f64]) -> Result<MonotonicMajorant> {
    majorant_with(mu, grid, &MajorantOptions::default())
}

pub fn majorant_with(mu: &DilatationField, grid: &[f64], opts: &MajorantOptions) -> Result<MonotonicMajorant> {
    if grid.is_empty() || grid.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(Error::invalid("majorant grid must be nonempty with positive finite heights"));
    }
    if grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("majorant grid heights must decrease toward 0"));
    }
    let heights: Vec<f64> = grid.iter().rev().copied().collect();
    let layers: Vec<(f64, f64)> = heights
        .iter()
        .enumerate()
        .map(|(j, &h)| (if j == 0 { h * 0.5f64.powi(20) } else { heights[j - 1] }, h))
        .collect();

    let mut layer_sup = vec![0.0f64; layers.len()];
    let mut previous: Option<Vec<f64>> = None;
    let mut n = opts.initial_samples.max(1);
    let mut depth = 0;
    loop {
        let fresh: Vec<f64> = layers
            .par_iter()
            .enumerate()
            .map(|(j, &(lo, hi))| sample_layer(mu, lo, hi, n, opts, j))
            .collect();
        for (s, f) in layer_sup.iter_mut().zip(fresh) {
            *s = s.max(f);
        }
        let cumulative = cumulative_max(&layer_sup);
        let settled = previous.as_ref().is_some_and(|prev| {
            prev.iter()
                .zip(&cumulative)
                .all(|(&a, &b)| (b - a).abs() <= opts.agreement * b.abs().max(f64::MIN_POSITIVE))
        });
        previous = Some(cumulative);
        if settled || n * 2 > opts.max_samples {
            break;
        }
        n *= 2;
        depth += 1;
    }
    let values = previous.expect("at least one level");
    MonotonicMajorant::from_samples(heights.into_iter().zip(values).collect(), depth)
}

fn cumulative_max(v: &[f64]) -> Vec<f64> {
    let mut acc = 0.0f64;
    v.iter()
        .map(|&x| {
            acc = acc.max(x);
            acc
        })
        .collect()
}

/// Largest sampled `|μ|` with `lo <= |y| < hi`, over both half-planes.
fn sample_layer(mu: &DilatationField, lo: f64, hi: f64, n: usize, opts: &MajorantOptions, layer: usize) -> f64 {
    let s = mu.support();
    let seed = opts
        .seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((layer as u64) << 20)
        .wrapping_add(n as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let top = hi * (1.0 - 1e-9);
    for sign in [1.0, -1.0] {
        let (a, b) = if sign > 0.0 { (lo, top) } else { (-top, -lo) };
        let ya = a.max(s.y0);
        let yb = b.min(s.y1);
        if !(ya <= yb) {
            continue;
        }
        let (ma, mb) = (ya.abs().min(yb.abs()), ya.abs().max(yb.abs()));
        let ma = ma.max(mb * 1e-12);
        let mut probe = |x: f64, m: f64| {
            let y = sign * m;
            if y >= s.y0 && y <= s.y1 {
                best = best.max(mu.eval_chart(x, y).norm());
            }
        };
        let ly = (mb / ma).ln();
        let dx = s.width() / n as f64;
        for i in 0..n {
            for j in 0..opts.height_strata {
                let x = s.x0 + (i as f64 + rng.gen::<f64>()) * dx;
                let m = ma * (ly * (j as f64 + rng.gen::<f64>()) / opts.height_strata as f64).exp();
                probe(x, m);
            }
        }
        for &x in &[s.x0, s.x1] {
            for &m in &[ma, mb] {
                probe(x, m);
            }
        }
        for &h in mu.hot_spots() {
            for e in -6..=6 {
                let off = mb * 2f64.powi(e);
                for &x in &[h, h - off, h + off] {
                    if x >= s.x0 && x <= s.x1 {
                        for &m in &[ma, (ma * mb).sqrt(), mb] {
                            probe(x, m);
                        }
                    }
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Rect;
    use num_complex::Complex64;

    #[test]
    fn zero_field_gives_zero_majorant() {
        let m = majorant(&DilatationField::zero(), &[1.0, 0.5, 0.25]).unwrap();
        assert!(m.is_zero());
        assert_eq!(m.eval(0.3), 0.0);
    }

    #[test]
    fn square_root_profile() {
        let f = DilatationField::power_law(0.5, Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        let m = majorant(&f, &default_heights(&f)).unwrap();
        for t in [1.0, 0.5, 0.1, 1e-3, 1e-9] {
            assert!((m.eval(t) - t.sqrt()).abs() < 1e-6 * t.sqrt(), "t={t}: {}", m.eval(t));
        }
        assert_eq!(m.eval(-0.25), m.eval(0.25));
    }

    #[test]
    fn constant_on_box_straddling_axis() {
        let f = DilatationField::constant(Complex64::new(0.0, 0.4), Rect::new(-1.0, 2.0, -0.5, 0.5)).unwrap();
        let m = majorant(&f, &default_heights(&f)).unwrap();
        for t in [0.5, 0.1, 1e-6] {
            assert!((m.eval(t) - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn nondecreasing_samples() {
        let f = DilatationField::power_law(0.3, Rect::new(0.0, 1.0, -0.7, 0.2)).unwrap();
        let m = majorant(&f, &default_heights(&f)).unwrap();
        assert!(m.samples.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn rejects_increasing_grid() {
        let f = DilatationField::zero();
        assert!(majorant(&f, &[0.1, 0.2]).is_err());
    }
}
