//! Cauchy transforms along parametrized curves and their boundary values.
//!
//! `C_Γ(f)(z) = (1/2πi) ∫ f(s) γ'(s) / (γ(s) - z) ds`. The `+` side of the curve is
//! the one the left normal `i γ'/|γ'|` points into (the interior of the positively
//! oriented unit circle, the upper half-plane for ℝ), so that
//! `F₊ - F₋ = f` on the curve.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{distance_to_curve, CurveDomain, ParametrizedCurve};
use crate::quadrature::{integrate_1d_with, integrate_pv_with, QuadOptions, QuadratureResult};

pub const NEAR_CURVE: f64 = 1e-10;
pub const TRANSFORM_TOL: f64 = 1e-11;

type DensityFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A density on a curve, as a function of the curve parameter.
#[derive(Clone)]
pub struct Density {
    values: DensityFn,
    support_window: (f64, f64),
    holder_hint: Option<f64>,
    breaks: Vec<f64>,
    tail_bound: f64,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("support_window", &self.support_window)
            .field("holder_hint", &self.holder_hint)
            .field("breaks", &self.breaks)
            .field("tail_bound", &self.tail_bound)
            .finish()
    }
}

impl Density {
    pub fn new<F>(values: F, support_window: (f64, f64)) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Density {
            values: Arc::new(values),
            support_window,
            holder_hint: None,
            breaks: Vec::new(),
            tail_bound: 0.0,
        }
    }

    /// A density on the unit circle given as a function of the point `ω = e^{iθ}`.
    pub fn on_circle<G>(g: G) -> Self
    where
        G: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Density::new(move |t| g(Complex64::from_polar(1.0, t)), (-PI, PI)).with_holder_hint(1.0)
    }

    /// The indicator of `[a, b]` on the real line.
    pub fn indicator(a: f64, b: f64) -> Self {
        Density::new(
            move |s| if s >= a && s <= b { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) },
            (a, b),
        )
    }

    pub fn with_holder_hint(mut self, alpha: f64) -> Self {
        self.holder_hint = Some(alpha);
        self
    }

    /// Parameters where the density is not smooth; quadrature splits there.
    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    /// Sup of `|f|` outside the support window, for densities that are truncated.
    pub fn with_tail_bound(mut self, bound: f64) -> Self {
        self.tail_bound = bound;
        self
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        (self.values)(s)
    }

    pub fn support_window(&self) -> (f64, f64) {
        self.support_window
    }

    pub fn holder_hint(&self) -> Option<f64> {
        self.holder_hint
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn scaled(&self, k: Complex64) -> Density {
        let inner = self.values.clone();
        Density {
            values: Arc::new(move |s| inner(s) * k),
            tail_bound: self.tail_bound * k.norm(),
            ..self.clone()
        }
    }

    /// Pointwise sum; the support window is the hull of both windows.
    pub fn plus(&self, other: &Density) -> Density {
        let (a, b) = (self.values.clone(), other.values.clone());
        let mut breaks = self.breaks.clone();
        breaks.extend(other.breaks.iter().copied());
        Density {
            values: Arc::new(move |s| a(s) + b(s)),
            support_window: (
                self.support_window.0.min(other.support_window.0),
                self.support_window.1.max(other.support_window.1),
            ),
            holder_hint: match (self.holder_hint, other.holder_hint) {
                (Some(x), Some(y)) => Some(x.min(y)),
                _ => None,
            },
            breaks,
            tail_bound: self.tail_bound + other.tail_bound,
        }
    }
}

fn transform_opts() -> QuadOptions {
    QuadOptions {
        tol: TRANSFORM_TOL,
        rel_tol: 0.0,
        ..Default::default()
    }
}

fn scale_result(mut r: QuadratureResult, k: Complex64) -> QuadratureResult {
    r.value *= k;
    r.abs_error_estimate *= k.norm();
    r
}

fn inv_two_pi_i() -> Complex64 {
    Complex64::new(0.0, -1.0 / (2.0 * PI))
}

/// Cauchy transform with its quadrature diagnostics.
pub fn cauchy_transform_result(curve: &ParametrizedCurve, f: &Density, z: Complex64, opts: &QuadOptions) -> Result<QuadratureResult> {
    let (a, b) = f.support_window;
    let d = distance_to_curve(curve, z, (a, b))?;
    if d < NEAR_CURVE {
        return Err(Error::TooCloseToCurve { point: z.to_string(), distance: d });
    }
    let r = integrate_1d_with(
        |s| f.eval(s) * curve.d1(s) / (curve.point(s) - z),
        a,
        b,
        &f.breaks,
        opts,
    )?;
    let mut r = scale_result(r, inv_two_pi_i());
    if f.tail_bound > 0.0 {
        r.abs_error_estimate += f.tail_bound / (b - a);
    }
    Ok(r)
}

pub fn cauchy_transform(curve: &ParametrizedCurve, f: &Density, z: Complex64) -> Result<Complex64> {
    Ok(cauchy_transform_result(curve, f, z, &transform_opts())?.value)
}

/// `C'_Γ(f)(z) = (1/2πi) ∫ f γ' / (γ - z)² ds`.
pub fn cauchy_derivative_result(curve: &ParametrizedCurve, f: &Density, z: Complex64, opts: &QuadOptions) -> Result<QuadratureResult> {
    let (a, b) = f.support_window;
    let d = distance_to_curve(curve, z, (a, b))?;
    if d < NEAR_CURVE {
        return Err(Error::TooCloseToCurve { point: z.to_string(), distance: d });
    }
    let r = integrate_1d_with(
        |s| {
            let w = curve.point(s) - z;
            f.eval(s) * curve.d1(s) / (w * w)
        },
        a,
        b,
        &f.breaks,
        opts,
    )?;
    Ok(scale_result(r, inv_two_pi_i()))
}

pub fn cauchy_derivative(curve: &ParametrizedCurve, f: &Density, z: Complex64) -> Result<Complex64> {
    Ok(cauchy_derivative_result(curve, f, z, &transform_opts())?.value)
}

/// `(1/2πi) PV ∫ f γ' / (γ - γ(s)) ds'`.
pub fn principal_value(curve: &ParametrizedCurve, f: &Density, s: f64) -> Result<QuadratureResult> {
    let p = curve.point(s);
    let kernel = |t: f64| f.eval(t) * curve.d1(t) / (curve.point(t) - p);
    let opts = QuadOptions {
        tol: 1e-10,
        ..Default::default()
    };
    let (a, b) = match curve.domain() {
        CurveDomain::UnitCircle => (s - PI, s + PI),
        CurveDomain::RealLine => f.support_window,
    };
    let r = if s > a && s < b {
        integrate_pv_with(kernel, s, a, b, &opts)?
    } else if s == a || s == b {
        return Err(Error::invalid(format!("parameter {s} sits on the edge of the support window")));
    } else {
        integrate_1d_with(kernel, a, b, &f.breaks, &opts)?
    };
    Ok(scale_result(r, inv_two_pi_i()))
}

/// Boundary values `F± = ±f(γ(s))/2 + (1/2πi) PV ∫ f γ'/(γ - γ(s))`.
pub fn plemelj_pair(curve: &ParametrizedCurve, f: &Density, s: f64) -> Result<(Complex64, Complex64)> {
    let pv = principal_value(curve, f, s)?.value;
    let half = f.eval(s) * 0.5;
    Ok((pv + half, pv - half))
}

pub fn jump(curve: &ParametrizedCurve, f: &Density, s: f64) -> Result<Complex64> {
    let (plus, minus) = plemelj_pair(curve, f, s)?;
    Ok(plus - minus)
}

/// `lim_{ε→0} C_Γ(f)(γ(s) + side · ε n(s))` by Richardson extrapolation over
/// `ε = ε₀ 2^-k`; `side = +1` approaches from the `+` side.
pub fn one_sided_limit(curve: &ParametrizedCurve, f: &Density, s: f64, side: f64, eps0: f64) -> Result<Complex64> {
    let n = curve.left_normal(s)? * side.signum();
    let p = curve.point(s);
    let opts = QuadOptions {
        tol: 1e-12,
        ..Default::default()
    };
    let levels = 7;
    let mut table: Vec<Vec<Complex64>> = Vec::with_capacity(levels);
    for k in 0..levels {
        let eps = eps0 * 0.5f64.powi(k as i32);
        let v = cauchy_transform_result(curve, f, p + n * eps, &opts)?.value;
        let mut row = vec![v];
        for m in 1..=k {
            let factor = 2f64.powi(m as i32) - 1.0;
            let next = row[m - 1] + (row[m - 1] - table[k - 1][m - 1]) / factor;
            row.push(next);
        }
        table.push(row);
    }
    Ok(table[levels - 1][levels - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn constant_density_on_circle() {
        let circle = ParametrizedCurve::unit_circle();
        let one = Density::on_circle(|_| c(1.0));
        assert!((cauchy_transform(&circle, &one, c(0.0)).unwrap() - c(1.0)).norm() < 1e-10);
        assert!(cauchy_transform(&circle, &one, c(2.0)).unwrap().norm() < 1e-10);
        let (p, m) = plemelj_pair(&circle, &one, 0.4).unwrap();
        assert!((p - c(1.0)).norm() < 1e-9 && m.norm() < 1e-9);
    }

    #[test]
    fn identity_density_on_circle() {
        let circle = ParametrizedCurve::unit_circle();
        let id = Density::on_circle(|w| w);
        assert!((cauchy_transform(&circle, &id, c(0.5)).unwrap() - c(0.5)).norm() < 1e-10);
        assert!(cauchy_transform(&circle, &id, c(1.5)).unwrap().norm() < 1e-10);
        let (p, m) = plemelj_pair(&circle, &id, 0.0).unwrap();
        assert!((p - c(1.0)).norm() < 1e-9 && m.norm() < 1e-9);
    }

    #[test]
    fn indicator_on_line() {
        let line = ParametrizedCurve::real_line();
        let chi = Density::indicator(-1.0, 1.0);
        let v = cauchy_transform(&line, &chi, Complex64::new(0.0, 1.0)).unwrap();
        assert!((v - c(0.25)).norm() < 1e-10, "{v}");
        assert!((jump(&line, &chi, 0.0).unwrap() - c(1.0)).norm() < 1e-12);
        let (p, m) = plemelj_pair(&line, &chi, 0.0).unwrap();
        assert!((p.re - 0.5).abs() < 1e-9 && (m.re + 0.5).abs() < 1e-9);
    }

    #[test]
    fn near_curve_is_refused() {
        let circle = ParametrizedCurve::unit_circle();
        let one = Density::on_circle(|_| c(1.0));
        assert!(matches!(
            cauchy_transform(&circle, &one, c(1.0 + 1e-12)),
            Err(Error::TooCloseToCurve { .. })
        ));
    }

    #[test]
    fn one_sided_limits_match_plemelj() {
        let circle = ParametrizedCurve::unit_circle();
        let f = Density::on_circle(|w| w * w + w.conj() * 0.5);
        let s = 0.9;
        let (p, m) = plemelj_pair(&circle, &f, s).unwrap();
        let lp = one_sided_limit(&circle, &f, s, 1.0, 0.05).unwrap();
        let lm = one_sided_limit(&circle, &f, s, -1.0, 0.05).unwrap();
        assert!((lp - p).norm() < 1e-6, "{lp} vs {p}");
        assert!((lm - m).norm() < 1e-6, "{lm} vs {m}");
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let circle = ParametrizedCurve::unit_circle();
        let f = Density::on_circle(|w| w.conj() + w * w);
        let z = Complex64::new(0.2, -0.3);
        let h = 1e-5;
        let fd = (cauchy_transform(&circle, &f, z + h).unwrap() - cauchy_transform(&circle, &f, z - h).unwrap()) / (2.0 * h);
        let d = cauchy_derivative(&circle, &f, z).unwrap();
        assert!((fd - d).norm() < 1e-7, "{fd} vs {d}");
    }
}
