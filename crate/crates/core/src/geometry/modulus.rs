use num_complex::Complex64;
use rayon::prelude::*;

use super::ParametrizedCurve;
use crate::error::{Error, Result};
use crate::quadrature::{classify_shells, DyadicOptions, IntegralVerdict, ShellTerm};

const COARSE: usize = 2048;
const ANCHORS: usize = 4096;

/// `min_{s ∈ window} |γ(s) - w|`: coarse grid, golden-section search around the
/// best grid minima, then a Newton polish on `|γ(s) - w|²`.
pub fn distance_to_curve(curve: &ParametrizedCurve, w: Complex64, window: (f64, f64)) -> Result<f64> {
    let (a, b) = window;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::EmptyWindow);
    }
    let h = (b - a) / COARSE as f64;
    let dist = |s: f64| (curve.point(s.clamp(a, b)) - w).norm();
    let grid: Vec<f64> = (0..=COARSE).map(|i| dist(a + i as f64 * h)).collect();
    let mut order: Vec<usize> = (0..=COARSE).collect();
    order.sort_by(|&i, &j| grid[i].total_cmp(&grid[j]).then(i.cmp(&j)));
    let mut best = grid[order[0]];
    for &i in order.iter().take(4) {
        let lo = (a + (i as f64 - 1.0) * h).max(a);
        let hi = (a + (i as f64 + 1.0) * h).min(b);
        let s = golden_section(&dist, lo, hi);
        let s = newton_polish(curve, w, s, lo, hi);
        best = best.min(dist(s));
    }
    Ok(best)
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

fn newton_polish(curve: &ParametrizedCurve, w: Complex64, mut s: f64, lo: f64, hi: f64) -> f64 {
    for _ in 0..8 {
        let r = curve.point(s) - w;
        let d1 = curve.d1(s);
        let d2 = curve.d2(s);
        let g = (r.conj() * d1).re;
        let hess = d1.norm_sqr() + (r.conj() * d2).re;
        if !(hess > 0.0) || !g.is_finite() {
            break;
        }
        let next = (s - g / hess).clamp(lo, hi);
        if (curve.point(next) - w).norm() > r.norm() {
            break;
        }
        s = next;
    }
    s
}

/// Sampled estimate of `ω(δ) = sup{|f(x₁) - f(x₂)| : |x₁ - x₂| <= δ}` on `window`.
///
/// Pairs at spans `δ` and `δ/2` are taken from an anchor grid; the best anchors are
/// then refined by zooming. The result is a lower bound on the true supremum.
pub fn modulus_of_continuity<F>(f: F, delta: f64, window: (f64, f64)) -> f64
where
    F: Fn(f64) -> Complex64 + Sync,
{
    modulus_of_continuity_with(f, delta, window, &[])
}

/// As [`modulus_of_continuity`], with pairs ending exactly at each of `hot_spots`
/// (points where `f` may have a cusp) added to the anchors.
pub fn modulus_of_continuity_with<F>(f: F, delta: f64, window: (f64, f64), hot_spots: &[f64]) -> f64
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let (a, b) = window;
    if !(delta > 0.0) || !(a < b) {
        return 0.0;
    }
    let span = delta.min(b - a);
    let starts = (a, b - span);
    let pair = |x: f64, d: f64| -> f64 {
        let x = x.clamp(a, b - d);
        (f(x + d) - f(x)).norm()
    };
    let score = |x: f64| pair(x, span).max(pair(x, 0.5 * span));
    let step = (starts.1 - starts.0) / ANCHORS as f64;
    let mut anchors: Vec<f64> = if step > 0.0 {
        (0..=ANCHORS).map(|i| starts.0 + i as f64 * step).collect()
    } else {
        vec![starts.0]
    };
    for &h in hot_spots {
        for x in [h, h - span, h - 0.5 * span] {
            if x >= starts.0 && x <= starts.1 {
                anchors.push(x);
            }
        }
    }
    let scores: Vec<f64> = anchors.par_iter().map(|&x| score(x)).collect();
    let mut order: Vec<usize> = (0..anchors.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    let mut best = scores[order[0]];
    for &i in order.iter().take(8) {
        let mut x = anchors[i];
        let mut width = step.max(span);
        let mut local = scores[i];
        while width > 1e-15 * (span + x.abs()) {
            let trial: Vec<(f64, f64)> = (-16..=16)
                .map(|k| {
                    let t = (x + width * k as f64 / 16.0).clamp(starts.0, starts.1);
                    (t, score(t))
                })
                .collect();
            for (t, v) in trial {
                if v > local {
                    local = v;
                    x = t;
                }
            }
            width /= 8.0;
        }
        best = best.max(local);
    }
    best
}

/// `ω` at several `δ`, made nondecreasing in `δ` by a running maximum.
pub fn modulus_sweep<F>(f: F, deltas: &[f64], window: (f64, f64)) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    modulus_sweep_with(f, deltas, window, &[])
}

pub fn modulus_sweep_with<F>(f: F, deltas: &[f64], window: (f64, f64), hot_spots: &[f64]) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let mut sorted: Vec<f64> = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut acc = 0.0f64;
    sorted
        .into_iter()
        .map(|d| {
            acc = acc.max(modulus_of_continuity_with(&f, d, window, hot_spots));
            (d, acc)
        })
        .collect()
}

/// Dyadic samples `t_j = outer · 2^-j`, `j = 0..=30`, of a modulus of continuity.
pub fn dyadic_modulus_samples<F>(f: F, outer: f64, window: (f64, f64)) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    dyadic_modulus_samples_with(f, outer, window, &[])
}

pub fn dyadic_modulus_samples_with<F>(f: F, outer: f64, window: (f64, f64), hot_spots: &[f64]) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let deltas: Vec<f64> = (0..=30).map(|j| outer * 0.5f64.powi(j)).collect();
    let mut s = modulus_sweep_with(f, &deltas, window, hot_spots);
    s.reverse();
    s
}

/// Verdict on `∫_0 ω(t)/t dt` from samples on the dyadic grid `outer · 2^-j`.
///
/// Each shell `(t_{j+1}, t_j]` contributes the trapezoid rule in `ln t`,
/// `(ω(t_j) + ω(t_{j+1}))/2 · ln 2`.
pub fn dini_verdict(omega: &[(f64, f64)], outer: f64) -> Result<IntegralVerdict> {
    let mut samples = omega.to_vec();
    samples.sort_by(|p, q| q.0.total_cmp(&p.0));
    if samples.len() < 2 {
        return Err(Error::invalid("dini verdict needs at least two samples"));
    }
    for (j, (t, w)) in samples.iter().enumerate() {
        let expected = outer * 0.5f64.powi(j as i32);
        if (t - expected).abs() > 1e-12 * expected || !w.is_finite() || *w < 0.0 {
            return Err(Error::invalid(format!("sample {j} must sit at outer * 2^-{j} with a finite nonnegative value")));
        }
    }
    let mut trace = Vec::with_capacity(samples.len() - 1);
    let mut sum = Complex64::new(0.0, 0.0);
    for w in samples.windows(2) {
        let term = Complex64::new(0.5 * (w[0].1 + w[1].1) * std::f64::consts::LN_2, 0.0);
        sum += term;
        trace.push(ShellTerm {
            outer: w[0].0,
            inner: w[1].0,
            term,
            partial_sum: sum,
            error: 0.0,
        });
    }
    Ok(classify_shells(trace, outer, &DyadicOptions::default()))
}

/// Largest angle between unit tangents at adjacent grid points.
pub fn tangent_continuity_check(curve: &ParametrizedCurve, grid: &[f64]) -> Result<f64> {
    let mut prev: Option<Complex64> = None;
    let mut worst = 0.0f64;
    for &s in grid {
        let d = curve.d1(s);
        let n = d.norm();
        if !(n >= 1e-14) {
            return Err(Error::ZeroDerivative(s));
        }
        let u = d / n;
        if let Some(p) = prev {
            worst = worst.max((u * p.conj()).arg().abs());
        }
        prev = Some(u);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn distances() {
        let line = ParametrizedCurve::real_line();
        assert!((distance_to_curve(&line, Complex64::new(0.3, 1.0), (-5.0, 5.0)).unwrap() - 1.0).abs() < 1e-12);
        let circle = ParametrizedCurve::unit_circle();
        let w = (-PI, PI);
        assert!((distance_to_curve(&circle, c(0.0), w).unwrap() - 1.0).abs() < 1e-12);
        assert!((distance_to_curve(&circle, c(2.0), w).unwrap() - 1.0).abs() < 1e-12);
        assert!(distance_to_curve(&circle, Complex64::from_polar(1.0, 0.7), w).unwrap() < 1e-8);
        assert!(matches!(distance_to_curve(&circle, c(0.0), (1.0, 1.0)), Err(Error::EmptyWindow)));
    }

    #[test]
    fn modulus_examples() {
        assert!((modulus_of_continuity(|x| c(x), 0.1, (0.0, 1.0)) - 0.1).abs() < 1e-12);
        assert_eq!(modulus_of_continuity(|_| c(2.0), 0.1, (0.0, 1.0)), 0.0);
        let w = modulus_of_continuity(|x| c(x.abs().sqrt()), 1e-4, (-1.0, 1.0));
        assert!((w - 1e-2).abs() < 1e-6, "{w}");
    }

    #[test]
    fn dini_examples() {
        let outer = 1.0 / E;
        let sample = |w: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
            (0..=30).map(|j| outer * 0.5f64.powi(j)).map(|t| (t, w(t))).collect()
        };
        assert!(dini_verdict(&sample(&|t| t), outer).unwrap().is_convergent());
        let v = dini_verdict(&sample(&|t| 1.0 / (1.0 / t).ln()), outer).unwrap();
        assert!(v.is_divergent(), "{:?}", v.kind);
        let v = dini_verdict(&sample(&|t| (1.0 / t).ln().powi(-2)), outer).unwrap();
        assert!(v.is_convergent(), "{:?}", v.kind);
    }

    #[test]
    fn tangents() {
        let circle = ParametrizedCurve::unit_circle();
        let grid: Vec<f64> = (0..=1000).map(|k| -PI + 2.0 * PI * k as f64 / 1000.0).collect();
        let jump = tangent_continuity_check(&circle, &grid).unwrap();
        assert!((jump - 2.0 * PI / 1000.0).abs() < 1e-12);
        let corner = ParametrizedCurve::polyline(vec![c(0.0), c(1.0), Complex64::new(1.0, 1.0)]).unwrap();
        for n in [10, 100, 1000] {
            let g: Vec<f64> = (0..=n).map(|k| 2.0 * k as f64 / n as f64).collect();
            assert!((tangent_continuity_check(&corner, &g).unwrap() - PI / 2.0).abs() < 1e-12);
        }
    }
}
