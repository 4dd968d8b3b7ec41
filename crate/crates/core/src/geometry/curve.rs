use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveDomain {
    RealLine,
    UnitCircle,
}

type ParamFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A curve `γ(s)` with its first and second parameter derivatives.
#[derive(Clone)]
pub struct ParametrizedCurve {
    name: String,
    domain: CurveDomain,
    point: ParamFn,
    d1: ParamFn,
    d2: ParamFn,
    /// Parameter interval covering the curve once (closed curves) or a natural window.
    window: (f64, f64),
}

impl fmt::Debug for ParametrizedCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametrizedCurve")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("window", &self.window)
            .finish()
    }
}

impl ParametrizedCurve {
    pub fn new<P, D1, D2>(name: impl Into<String>, domain: CurveDomain, window: (f64, f64), point: P, d1: D1, d2: D2) -> Self
    where
        P: Fn(f64) -> Complex64 + Send + Sync + 'static,
        D1: Fn(f64) -> Complex64 + Send + Sync + 'static,
        D2: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        ParametrizedCurve {
            name: name.into(),
            domain,
            point: Arc::new(point),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            window,
        }
    }

    /// `γ(s) = s`.
    pub fn real_line() -> Self {
        ParametrizedCurve::new(
            "real_line",
            CurveDomain::RealLine,
            (-1.0, 1.0),
            |s| Complex64::new(s, 0.0),
            |_| Complex64::new(1.0, 0.0),
            |_| Complex64::new(0.0, 0.0),
        )
    }

    /// `γ(θ) = e^{iθ}`, `θ ∈ [-π, π]`.
    pub fn unit_circle() -> Self {
        ParametrizedCurve::new(
            "unit_circle",
            CurveDomain::UnitCircle,
            (-PI, PI),
            |t| Complex64::from_polar(1.0, t),
            |t| Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, t),
            |t| -Complex64::from_polar(1.0, t),
        )
    }

    /// Piecewise-linear curve through `vertices`, segment `k` on `s ∈ [k, k + 1]`.
    ///
    /// At a vertex the one-sided derivative of the following segment is used.
    pub fn polyline(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid("polyline needs at least two vertices"));
        }
        let v = Arc::new(vertices);
        let segments = v.len() - 1;
        let locate = move |s: f64| -> (usize, f64) {
            let k = (s.floor().max(0.0) as usize).min(segments - 1);
            (k, s - k as f64)
        };
        let (v1, v2) = (v.clone(), v.clone());
        Ok(ParametrizedCurve::new(
            "polyline",
            CurveDomain::RealLine,
            (0.0, segments as f64),
            move |s| {
                let (k, u) = locate(s);
                v1[k] + (v1[k + 1] - v1[k]) * u
            },
            move |s| {
                let (k, _) = locate(s);
                v2[k + 1] - v2[k]
            },
            |_| Complex64::new(0.0, 0.0),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> CurveDomain {
        self.domain
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn point(&self, s: f64) -> Complex64 {
        (self.point)(s)
    }

    pub fn d1(&self, s: f64) -> Complex64 {
        (self.d1)(s)
    }

    pub fn d2(&self, s: f64) -> Complex64 {
        (self.d2)(s)
    }

    /// Arc-length weight `|γ'(s)|`.
    pub fn speed(&self, s: f64) -> f64 {
        self.d1(s).norm()
    }

    /// Unit normal pointing to the left of the direction of travel.
    pub fn left_normal(&self, s: f64) -> Result<Complex64> {
        let d = self.d1(s);
        let n = d.norm();
        if !(n > 1e-14) {
            return Err(Error::ZeroDerivative(s));
        }
        Ok(Complex64::new(0.0, 1.0) * d / n)
    }

    /// Largest relative mismatch between the supplied derivatives and centered
    /// differences of `point` (and of `d1` for the second derivative).
    pub fn derivative_mismatch(&self, probes: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for &s in probes {
            let h = 1e-5 * (1.0 + s.abs());
            let fd1 = (self.point(s + h) - self.point(s - h)) / (2.0 * h);
            let fd2 = (self.d1(s + h) - self.d1(s - h)) / (2.0 * h);
            let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm().max(1.0);
            worst = worst.max(rel(fd1, self.d1(s))).max(rel(fd2, self.d2(s)));
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_derivatives_match_differences() {
        let c = ParametrizedCurve::unit_circle();
        let probes: Vec<f64> = (0..50).map(|k| -3.0 + 0.12 * k as f64).collect();
        assert!(c.derivative_mismatch(&probes) < 1e-5);
        assert!((c.left_normal(0.0).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn polyline_points() {
        let p = ParametrizedCurve::polyline(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0)]).unwrap();
        assert_eq!(p.point(1.5), Complex64::new(1.0, 0.5));
        assert_eq!(p.d1(0.5), Complex64::new(1.0, 0.0));
        assert_eq!(p.window(), (0.0, 2.0));
    }
}
