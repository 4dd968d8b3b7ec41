use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DilatationField, MonotonicMajorant};
use crate::error::{Error, Result};
use crate::quadrature::{
    dyadic_shells, improper_dyadic_with, integrate_1d_with, integrate_2d_with, DyadicOptions, IntegralVerdict,
    QuadOptions, QuadratureResult, Rect,
};

/// Tolerance used for the condition integrals unless the caller overrides it.
pub const CONDITION_TOL: f64 = 1e-8;

fn sigma_opts() -> QuadOptions {
    QuadOptions {
        tol: f64::MIN_POSITIVE,
        rel_tol: 1e-11,
        ..Default::default()
    }
}

/// `σ(y) = (∫ |μ(x + iy)|² dx)^{1/2}`; on the circle the slice is the arc at radius `1 + y`.
pub fn sigma_profile(mu: &DilatationField, y: f64) -> Result<f64> {
    if y == 0.0 || !y.is_finite() {
        return Err(Error::invalid(format!("sigma needs a finite nonzero height, got {y}")));
    }
    let s = mu.support();
    if y < s.y0 || y > s.y1 {
        return Ok(0.0);
    }
    let weight = mu.geometry().area_weight(y);
    let g = |x: f64| mu.eval_chart(x, y).norm_sqr() * weight;
    Ok(slice_integral(&g, s.x0, s.x1, y.abs(), mu.hot_spots())?.sqrt())
}

/// `∫_{x0}^{x1} g`, resolving features of width `scale` around each hot spot
/// with the substitution `x = h ± scale · sinh(u)`.
fn slice_integral<G: Fn(f64) -> f64>(g: &G, x0: f64, x1: f64, scale: f64, hot: &[f64]) -> Result<f64> {
    let opts = sigma_opts();
    let mut spots: Vec<f64> = hot.iter().copied().filter(|&h| h > x0 && h < x1).collect();
    spots.sort_by(f64::total_cmp);
    spots.dedup();
    let c = |v: f64| Complex64::new(v, 0.0);
    if spots.is_empty() {
        return Ok(integrate_1d_with(|x| c(g(x)), x0, x1, &[], &opts)?.value.re);
    }
    let mut total = 0.0;
    let mut edges = vec![x0];
    for w in spots.windows(2) {
        edges.push(0.5 * (w[0] + w[1]));
    }
    edges.push(x1);
    for (i, &h) in spots.iter().enumerate() {
        let (left, right) = (edges[i], edges[i + 1]);
        for (dir, reach) in [(-1.0, h - left), (1.0, right - h)] {
            if reach <= 0.0 {
                continue;
            }
            let umax = (reach / scale).asinh();
            let r = integrate_1d_with(
                |u| {
                    let x = h + dir * scale * u.sinh();
                    c(g(x.clamp(left, right)) * scale * u.cosh())
                },
                0.0,
                umax,
                &[],
                &opts,
            )?;
            total += r.value.re;
        }
    }
    Ok(total)
}

/// Integrates a fallible integrand, surfacing the first inner error.
fn fallible_1d<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let r = integrate_1d_with(
        |x| match f(x) {
            Ok(v) => Complex64::new(v, 0.0),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        a,
        b,
        &[],
        opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    r
}

pub fn condition1(majorant: &MonotonicMajorant, outer: f64) -> Result<IntegralVerdict> {
    condition1_with(majorant, outer, &DyadicOptions::with_tol(CONDITION_TOL))
}

/// `∫_0^outer μ*(t)/t · ln(1/t) dt`.
pub fn condition1_with(majorant: &MonotonicMajorant, outer: f64, opts: &DyadicOptions) -> Result<IntegralVerdict> {
    if !(outer > 0.0 && outer < 1.0) {
        return Err(Error::invalid(format!("condition 1 needs 0 < outer < 1, got {outer}")));
    }
    improper_dyadic_with(
        |t| Complex64::new(majorant.eval(t) / t * (1.0 / t).ln(), 0.0),
        0.0,
        outer,
        opts,
    )
}

pub fn condition2(mu: &DilatationField, inner: f64, outer: f64) -> Result<IntegralVerdict> {
    condition2_with(mu, inner, outer, &DyadicOptions::with_tol(CONDITION_TOL))
}

/// `∫ σ(y)/|y|^{3/2} dy` over both signs of `y`: dyadic shells on `0 < |y| <= outer`
/// and a regular integral over the rest of the support.
pub fn condition2_with(mu: &DilatationField, inner: f64, outer: f64, opts: &DyadicOptions) -> Result<IntegralVerdict> {
    if !(inner >= 0.0 && inner < outer) {
        return Err(Error::invalid(format!("condition 2 needs 0 <= inner < outer, got ({inner}, {outer})")));
    }
    let integrand = |y: f64| -> Result<f64> { Ok((sigma_profile(mu, y)? + sigma_profile(mu, -y)?) * y.powf(-1.5)) };
    let quad = opts.shell_quad();
    let mut verdict = condition2_strip(mu, inner, outer, opts)?;
    let s = mu.support();
    let top = s.y1.max(-s.y0);
    if top > outer {
        let regular = fallible_1d(integrand, outer, top, &quad)?;
        verdict = verdict.combine(&IntegralVerdict::from_quadrature(&regular));
    }
    Ok(verdict)
}

/// The part of condition 2 over `inner < |y| <= outer` only.
pub fn condition2_strip(mu: &DilatationField, inner: f64, outer: f64, opts: &DyadicOptions) -> Result<IntegralVerdict> {
    if !(inner >= 0.0 && inner < outer) {
        return Err(Error::invalid(format!("condition 2 needs 0 <= inner < outer, got ({inner}, {outer})")));
    }
    let integrand = |y: f64| -> Result<f64> { Ok((sigma_profile(mu, y)? + sigma_profile(mu, -y)?) * y.powf(-1.5)) };
    let quad = opts.shell_quad();
    dyadic_shells(|lo, hi| fallible_1d(integrand, lo, hi, &quad), inner, outer, opts)
}

/// Probe points off the boundary: a few abscissae across the support (and its hot
/// spots) at heights `±2^-k · H`, `k = 1..=8`.
pub fn default_probes(mu: &DilatationField) -> Vec<Complex64> {
    let s = mu.support();
    let h = mu.max_height();
    let mut xs: Vec<f64> = (0..5).map(|i| s.x0 + (i as f64 + 0.5) / 5.0 * s.width()).collect();
    xs.extend(mu.hot_spots().iter().copied().filter(|&x| x >= s.x0 && x <= s.x1));
    let mut out = Vec::new();
    for &x in &xs {
        for k in 1..=8 {
            for sign in [1.0, -1.0] {
                let y = sign * h * 0.5f64.powi(k);
                if mu.geometry() == super::Geometry::Circle && y <= -1.0 {
                    continue;
                }
                out.push(mu.geometry().to_plane(x, y));
            }
        }
    }
    out
}

/// `sup |μ(z₀)| / mean_{|z - z₀| < C d(z₀)} |μ|`, with `d` the distance to the boundary curve.
///
/// Returns `f64::INFINITY` when some disk mean vanishes while `μ(z₀) ≠ 0`.
pub fn condition3_ratio(mu: &DilatationField, c: f64, probes: &[Complex64]) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("condition 3 constant must be positive, got {c}")));
    }
    let mut worst = 0.0f64;
    for &z0 in probes {
        let d = mu.geometry().boundary_distance(z0);
        let radius = c * d;
        if !(radius > 1e-150) || !radius.is_finite() {
            return Err(Error::DegenerateDisk { probe: z0.to_string() });
        }
        let center = mu.eval(z0).norm();
        if center == 0.0 {
            continue;
        }
        let area = PI * radius * radius;
        let opts = QuadOptions {
            tol: 1e-9 * area,
            rel_tol: 1e-7,
            ..Default::default()
        };
        // disks that cross an edge of the support see a curved jump
        let r = match integrate_2d_with(
            |rho, phi| Complex64::new(mu.eval(z0 + Complex64::from_polar(rho, phi)).norm() * rho, 0.0),
            Rect::new(0.0, radius, 0.0, 2.0 * PI),
            &[],
            &[],
            &opts,
        ) {
            Err(Error::BudgetExceeded { partial, .. }) if partial.abs_error_estimate <= 1e-4 * partial.value.norm() => *partial,
            other => other?,
        };
        let mean = r.value.re / area;
        if mean <= 0.0 {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(center / mean);
    }
    Ok(worst)
}

fn piece_opts(opts: &DyadicOptions) -> QuadOptions {
    QuadOptions {
        tol: opts.tol / 256.0,
        rel_tol: 1e-10,
        ..Default::default()
    }
}

fn integrate_pieces<F>(f: &F, pieces: &[Rect], support: Rect, xb: &[f64], yb: &[f64], opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let mut total = QuadratureResult::zero();
    for piece in pieces {
        if let Some(r) = piece.intersect(&support) {
            let q = integrate_2d_with(f, r, xb, yb, opts)?;
            total.value += q.value;
            total.abs_error_estimate += q.abs_error_estimate;
            total.evaluations += q.evaluations;
            total.converged &= q.converged;
        }
    }
    Ok(total)
}

pub fn twb_integral(mu: &DilatationField, t: f64, inner_cut: f64) -> Result<IntegralVerdict> {
    twb_integral_with(mu, t, inner_cut, &DyadicOptions::with_tol(CONDITION_TOL))
}

/// `∬ |μ(z + t)| / |z|² dx dy`, evaluated as `∬ |μ(w)| / |w - p|²` with `p` the
/// boundary point at parameter `t`. When `p` touches the support the integral is
/// split into square annuli around `p` and classified shell by shell.
pub fn twb_integral_with(mu: &DilatationField, t: f64, inner_cut: f64, opts: &DyadicOptions) -> Result<IntegralVerdict> {
    if !(inner_cut >= 0.0) {
        return Err(Error::invalid(format!("inner cut must be >= 0, got {inner_cut}")));
    }
    let g = mu.geometry();
    let p = g.to_plane(t, 0.0);
    let f = |x: f64, y: f64| {
        let m = mu.eval_chart(x, y).norm();
        if m == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(m * g.area_weight(y) / (g.to_plane(x, y) - p).norm_sqr(), 0.0)
    };
    let s = mu.support();
    let quad = piece_opts(opts);
    let at = Complex64::new(t, 0.0);
    if !s.contains(at) {
        let r = integrate_2d_with(f, s, &[t], &[0.0], &QuadOptions { tol: opts.tol, ..quad })?;
        return Ok(IntegralVerdict::from_quadrature(&r));
    }
    // shells in u = x - t, so rings far below the spacing of floats near t stay resolved
    let local = |u: f64, y: f64| {
        let m = mu.eval_chart(t + u, y).norm();
        if m == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(m * g.area_weight(y) / g.offset(t, u, y).norm_sqr(), 0.0)
    };
    let shifted = Rect::new(s.x0 - t, s.x1 - t, s.y0, s.y1);
    let reach = s.sup_distance(at);
    dyadic_shells(
        |lo, hi| {
            let ring = [
                Rect::new(-hi, hi, lo, hi),
                Rect::new(-hi, hi, -hi, -lo),
                Rect::new(-hi, -lo, -lo, lo),
                Rect::new(lo, hi, -lo, lo),
            ];
            integrate_pieces(&local, &ring, shifted, &[0.0], &[0.0], &quad)
        },
        inner_cut,
        reach,
        opts,
    )
}

pub fn prop1_integral(mu: &DilatationField, a: f64) -> Result<IntegralVerdict> {
    prop1_integral_with(mu, a, &DyadicOptions::with_tol(CONDITION_TOL))
}

/// `∬ |μ(z)| / (|z - a| |y|) dx dy`, with dyadic strips in `|y|`.
pub fn prop1_integral_with(mu: &DilatationField, a: f64, opts: &DyadicOptions) -> Result<IntegralVerdict> {
    let g = mu.geometry();
    // u = x - a, as in the TWB shells
    let f = |u: f64, y: f64| {
        let m = mu.eval_chart(a + u, y).norm();
        if m == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(m * g.area_weight(y) / (g.offset(a, u, y).norm() * y.abs()), 0.0)
    };
    let s = mu.support();
    let shifted = Rect::new(s.x0 - a, s.x1 - a, s.y0, s.y1);
    let quad = piece_opts(opts);
    let top = mu.max_height();
    dyadic_shells(
        |lo, hi| {
            let strips = [Rect::new(shifted.x0, shifted.x1, lo, hi), Rect::new(shifted.x0, shifted.x1, -hi, -lo)];
            integrate_pieces(&f, &strips, shifted, &[0.0], &[], &quad)
        },
        0.0,
        top,
        opts,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub param: f64,
    pub verdict: IntegralVerdict,
}

/// Verdicts over a parameter sweep; `sup` is present only when every entry converged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    #[serde(with = "crate::serde_util::extended_f64_option")]
    pub sup: Option<f64>,
    pub argmax: Option<f64>,
    pub entries: Vec<SweepEntry>,
}

impl Sweep {
    fn collect<F>(params: &[f64], mut run: F) -> Result<Sweep>
    where
        F: FnMut(f64) -> Result<IntegralVerdict>,
    {
        let mut entries = Vec::with_capacity(params.len());
        for &param in params {
            entries.push(SweepEntry { param, verdict: run(param)? });
        }
        let mut sup: Option<f64> = Some(0.0);
        let mut argmax = None;
        for e in &entries {
            match (e.verdict.value(), sup) {
                (Some(v), Some(s)) => {
                    if argmax.is_none() || v.norm() > s {
                        sup = Some(v.norm());
                        argmax = Some(e.param);
                    }
                }
                _ => sup = None,
            }
        }
        if sup.is_none() {
            argmax = None;
        }
        Ok(Sweep { sup, argmax, entries })
    }
}

pub fn twb_sweep(mu: &DilatationField, ts: &[f64], opts: &DyadicOptions) -> Result<Sweep> {
    Sweep::collect(ts, |t| twb_integral_with(mu, t, 0.0, opts))
}

pub fn prop1_sweep(mu: &DilatationField, points: &[f64], opts: &DyadicOptions) -> Result<Sweep> {
    Sweep::collect(points, |a| prop1_integral_with(mu, a, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, SQRT_2};

    fn unit() -> Rect {
        Rect::new(-1.0, 1.0, -1.0, 1.0)
    }

    #[test]
    fn sigma_of_power_law() {
        let f = DilatationField::power_law(0.75, unit()).unwrap();
        let s = sigma_profile(&f, 0.25).unwrap();
        assert!((s - SQRT_2 * 0.25f64.powf(0.75)).abs() < 1e-12);
        assert_eq!(sigma_profile(&DilatationField::zero(), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn condition1_closed_forms() {
        let v = condition1(&MonotonicMajorant::exact(f64::sqrt), 0.5).unwrap();
        let expected = 0.5f64.sqrt() * (4.0 + 2.0 * LN_2);
        assert!((v.value().unwrap().re - expected).abs() < 1e-6);
        let v = condition1(&MonotonicMajorant::exact(|t: f64| (1.0 / t).ln().powi(-3)), (-1.0f64).exp()).unwrap();
        assert!((v.value().unwrap().re - 1.0).abs() < 1e-6, "{:?}", v.kind);
        let v = condition1(&MonotonicMajorant::exact(|t: f64| 1.0 / (1.0 / t).ln()), 0.3).unwrap();
        assert!(v.is_divergent());
    }

    #[test]
    fn condition2_closed_forms() {
        let f = DilatationField::power_law(0.75, unit()).unwrap();
        let v = condition2(&f, 0.0, 1.0).unwrap();
        assert!((v.value().unwrap().re - 8.0 * SQRT_2).abs() < 1e-6, "{:?}", v.kind);
        let f = DilatationField::power_law(0.25, unit()).unwrap();
        assert!(condition2(&f, 0.0, 1.0).unwrap().is_divergent());
        let v = condition2(&DilatationField::zero(), 0.0, 1.0).unwrap();
        assert_eq!(v.value().unwrap().re, 0.0);
    }

    #[test]
    fn condition2_with_partial_dyadic_range() {
        let f = DilatationField::power_law(0.75, unit()).unwrap();
        let v = condition2(&f, 0.0, 0.25).unwrap();
        assert!((v.value().unwrap().re - 8.0 * SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn condition3_examples() {
        let f = DilatationField::power_law(1.0, Rect::new(-1.0, 1.0, -0.9, 0.9)).unwrap();
        let r = condition3_ratio(&f, 0.5, &[Complex64::new(0.0, 0.1)]).unwrap();
        assert!((r - 1.0).abs() < 1e-8);
        let z = DilatationField::zero();
        assert_eq!(condition3_ratio(&z, 0.5, &default_probes(&z)).unwrap(), 0.0);
        let c = Complex64::new(0.0, 2f64.powi(-10));
        let rad = 2f64.powi(-12);
        let disk = DilatationField::from_chart_fn(
            "disk",
            move |x, y| {
                if (Complex64::new(x, y) - c).norm() < rad {
                    Complex64::new(0.5, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
            Rect::square(c, rad),
            0.5,
            crate::dilatation::Geometry::Line,
        )
        .unwrap();
        let r = condition3_ratio(&disk, 1.0, &[c]).unwrap();
        assert!((r - 16.0).abs() < 1e-6, "{r}");
    }

    #[test]
    fn twb_closed_form_and_translation() {
        let f = DilatationField::power_law(1.0, unit()).unwrap();
        let v = twb_integral(&f, 0.0, 0.0).unwrap();
        assert!((v.value().unwrap().re - (PI + 2.0 * LN_2)).abs() < 1e-6, "{:?}", v.kind);
        for t in [0.3, 1.7] {
            let a = twb_integral(&f, t, 0.0).unwrap().value().unwrap();
            let b = twb_integral(&f.shifted(t), 0.0, 0.0).unwrap().value().unwrap();
            assert!((a - b).norm() < 1e-7, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn deep_shells_away_from_the_origin() {
        let f = DilatationField::power_law(0.55, unit()).unwrap();
        for t in [0.4, -0.9] {
            let a = twb_integral(&f, t, 0.0).unwrap().value().unwrap();
            let b = twb_integral(&f.shifted(t), 0.0, 0.0).unwrap().value().unwrap();
            assert!((a - b).norm() < 1e-7, "t={t}: {a} vs {b}");
            let a = prop1_integral(&f, t).unwrap().value().unwrap();
            let b = prop1_integral(&f.shifted(t), 0.0).unwrap().value().unwrap();
            assert!((a - b).norm() < 1e-7, "a={t}: {a} vs {b}");
        }
    }

    #[test]
    fn twb_of_constant_diverges() {
        let f = DilatationField::constant(Complex64::new(0.2, 0.0), unit()).unwrap();
        assert!(twb_integral(&f, 0.0, 0.0).unwrap().is_divergent());
    }

    #[test]
    fn prop1_closed_form() {
        let f = DilatationField::power_law(1.0, unit()).unwrap();
        let v = prop1_integral(&f, 0.0).unwrap();
        let expected = 8.0 * (1.0 + SQRT_2).ln();
        assert!((v.value().unwrap().re - expected).abs() < 1e-6, "{:?}", v.kind);
        let z = prop1_integral(&DilatationField::zero(), 0.3).unwrap();
        assert_eq!(z.value().unwrap().re, 0.0);
    }
}
