//! Explicit quasiconformal maps and the pullback identity for Cauchy transforms.
//!
//! For a map `ρ` with `Γ = ρ(B)` (`B` is ℝ or the unit circle), a density `f` on `Γ`
//! pulls back to `g = f ∘ ρ` on `B`. The difference `H = C_Γ(f) ∘ ρ - C_B(g)`
//! has no jump across `B`, so it is recovered from its `∂̄`-derivative
//! `μ ∂G` with `G = C_Γ(f) ∘ ρ`.

mod bounds;
mod identity;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cauchy::Density;
use crate::dilatation::{DilatationField, Geometry};
use crate::error::{Error, Result};
use crate::geometry::{CurveDomain, ParametrizedCurve};
use crate::quadrature::Rect;

pub use bounds::{lemma1_bounds, lemma1_solve, reverse_holder_ratio, BoundMode};
pub use identity::{
    h_direct, h_via_formula, theorem1_report, Bounds, ProbeRow, Theorem1Report, Verdict, FORMULA_TOL,
};

type MapFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Where the map's formulas are valid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Plane,
    /// `r_min <= |z| <= r_max`.
    Annulus { r_min: f64, r_max: f64 },
}

impl Region {
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Plane => z.re.is_finite() && z.im.is_finite(),
            Region::Annulus { r_min, r_max } => {
                let r = z.norm();
                r >= r_min && r <= r_max
            }
        }
    }

    pub fn contains_rect(&self, q: &Rect) -> bool {
        match *self {
            Region::Plane => q.is_valid(),
            Region::Annulus { r_min, r_max } => {
                let nearest = Complex64::new(0.0f64.clamp(q.x0, q.x1), 0.0f64.clamp(q.y0, q.y1));
                let far = [q.x0.abs().max(q.x1.abs()), q.y0.abs().max(q.y1.abs())];
                q.is_valid() && nearest.norm() >= r_min && far[0].hypot(far[1]) <= r_max
            }
        }
    }
}

/// A quasiconformal map with its Wirtinger derivatives `∂ρ` and `∂̄ρ`.
///
/// `conformal_outside` is a box in the chart of `boundary` (the plane for ℝ,
/// `(θ, r - 1)` for the circle) outside which `∂̄ρ = 0`.
#[derive(Clone)]
pub struct ExplicitQCMap {
    name: String,
    eval: MapFn,
    dz: MapFn,
    dzbar: MapFn,
    domain_of_validity: Region,
    conformal_outside: Option<Rect>,
    boundary: CurveDomain,
    hot_spots: Vec<f64>,
}

impl fmt::Debug for ExplicitQCMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExplicitQCMap")
            .field("name", &self.name)
            .field("domain_of_validity", &self.domain_of_validity)
            .field("conformal_outside", &self.conformal_outside)
            .field("boundary", &self.boundary)
            .finish()
    }
}

fn psi(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - t * t).powi(4)
    }
}

fn dpsi(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        -8.0 * t * (1.0 - t * t).powi(3)
    }
}

impl ExplicitQCMap {
    #[allow(clippy::too_many_arguments)]
    pub fn new<E, D, B>(
        name: impl Into<String>,
        eval: E,
        dz: D,
        dzbar: B,
        domain_of_validity: Region,
        conformal_outside: Option<Rect>,
        boundary: CurveDomain,
    ) -> Self
    where
        E: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        D: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        B: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        ExplicitQCMap {
            name: name.into(),
            eval: Arc::new(eval),
            dz: Arc::new(dz),
            dzbar: Arc::new(dzbar),
            domain_of_validity,
            conformal_outside,
            boundary,
            hot_spots: Vec::new(),
        }
    }

    pub fn with_hot_spots(mut self, xs: Vec<f64>) -> Self {
        self.hot_spots = xs;
        self
    }

    pub fn identity() -> Self {
        ExplicitQCMap::new(
            "identity",
            |z| z,
            |_| Complex64::new(1.0, 0.0),
            |_| Complex64::new(0.0, 0.0),
            Region::Plane,
            Some(Rect::new(-1.0, 1.0, -1.0, 1.0)),
            CurveDomain::RealLine,
        )
    }

    /// `ρ(z) = a z + b z̄ + c`, requires `|b| < |a|`.
    pub fn affine(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        if !(b.norm() < a.norm()) {
            return Err(Error::invalid(format!("affine map with |b| = {} >= |a| = {}", b.norm(), a.norm())));
        }
        let conformal = if b == Complex64::new(0.0, 0.0) { Some(Rect::new(-1.0, 1.0, -1.0, 1.0)) } else { None };
        Ok(ExplicitQCMap::new(
            "affine",
            move |z| a * z + b * z.conj() + c,
            move |_| a,
            move |_| b,
            Region::Plane,
            conformal,
            CurveDomain::RealLine,
        ))
    }

    /// `ρ(z) = z + i ε ψ(x) ψ(y)` with `ψ(t) = (1 - t²)⁴` on `|t| < 1`.
    pub fn bump(eps: f64) -> Result<Self> {
        // |∂̄ρ| <= 1.35 |ε| and |∂ρ| >= 1 - 1.35 |ε|
        if !(eps.abs() < 0.25) {
            return Err(Error::invalid(format!("bump amplitude {eps} too large")));
        }
        let i = Complex64::new(0.0, 1.0);
        let grads = |z: Complex64| (dpsi(z.re) * psi(z.im), psi(z.re) * dpsi(z.im));
        Ok(ExplicitQCMap::new(
            format!("bump({eps})"),
            move |z| z + i * eps * psi(z.re) * psi(z.im),
            move |z| {
                let (px, py) = grads(z);
                1.0 + i * eps * 0.5 * Complex64::new(px, -py)
            },
            move |z| {
                let (px, py) = grads(z);
                i * eps * 0.5 * Complex64::new(px, py)
            },
            Region::Plane,
            Some(Rect::new(-1.0, 1.0, -1.0, 1.0)),
            CurveDomain::RealLine,
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    pub fn wirtinger_z(&self, z: Complex64) -> Complex64 {
        (self.dz)(z)
    }

    pub fn wirtinger_zbar(&self, z: Complex64) -> Complex64 {
        (self.dzbar)(z)
    }

    pub fn jacobian(&self, z: Complex64) -> f64 {
        self.wirtinger_z(z).norm_sqr() - self.wirtinger_zbar(z).norm_sqr()
    }

    pub fn domain_of_validity(&self) -> Region {
        self.domain_of_validity
    }

    pub fn conformal_outside(&self) -> Option<Rect> {
        self.conformal_outside
    }

    pub fn boundary(&self) -> CurveDomain {
        self.boundary
    }

    pub fn geometry(&self) -> Geometry {
        match self.boundary {
            CurveDomain::RealLine => Geometry::Line,
            CurveDomain::UnitCircle => Geometry::Circle,
        }
    }

    /// The boundary `B` itself.
    pub fn base_curve(&self) -> ParametrizedCurve {
        match self.boundary {
            CurveDomain::RealLine => ParametrizedCurve::real_line(),
            CurveDomain::UnitCircle => ParametrizedCurve::unit_circle(),
        }
    }

    /// `Γ = ρ(B)` with the parametrization inherited from `B`.
    pub fn image_curve(&self) -> ParametrizedCurve {
        let base = self.base_curve();
        let (b1, b2) = (base.clone(), base.clone());
        let (m1, m2) = (self.clone(), self.clone());
        let tangent = move |s: f64| {
            let p = b2.point(s);
            let d = b2.d1(s);
            m1.wirtinger_z(p) * d + m1.wirtinger_zbar(p) * d.conj()
        };
        let t2 = tangent.clone();
        ParametrizedCurve::new(
            format!("{}(base)", self.name),
            self.boundary,
            base.window(),
            move |s| m2.eval(b1.point(s)),
            tangent,
            move |s| {
                let h = 1e-5 * (1.0 + s.abs());
                (t2(s + h) - t2(s - h)) / (2.0 * h)
            },
        )
    }

    /// Largest relative mismatch between the supplied Wirtinger derivatives and
    /// centered differences, measured against `|∂ρ|`.
    pub fn wirtinger_mismatch(&self, probes: &[Complex64]) -> f64 {
        let mut worst = 0.0f64;
        for &z in probes {
            let (dz, dzbar) = fd_wirtinger(|w| self.eval(w), z);
            let scale = self.wirtinger_z(z).norm().max(1e-300);
            worst = worst
                .max((dz - self.wirtinger_z(z)).norm() / scale)
                .max((dzbar - self.wirtinger_zbar(z)).norm() / scale);
        }
        worst
    }

    /// Checks `|∂̄ρ| < |∂ρ|` at every probe inside the domain of validity.
    pub fn check_orientation(&self, probes: &[Complex64]) -> Result<()> {
        for &z in probes.iter().filter(|z| self.domain_of_validity.contains(**z)) {
            if !(self.wirtinger_zbar(z).norm() < self.wirtinger_z(z).norm()) {
                return Err(Error::NegativeJacobian(z.to_string()));
            }
        }
        Ok(())
    }
}

/// Centered-difference Wirtinger derivatives `(∂F, ∂̄F)`.
pub fn fd_wirtinger<F: Fn(Complex64) -> Complex64>(f: F, z: Complex64) -> (Complex64, Complex64) {
    let h = 1e-6 * (1.0 + z.norm());
    let i = Complex64::new(0.0, 1.0);
    let fx = (f(z + h) - f(z - h)) / (2.0 * h);
    let fy = (f(z + i * h) - f(z - i * h)) / (2.0 * h);
    ((fx - i * fy) * 0.5, (fx + i * fy) * 0.5)
}

/// `μ_ρ = ∂̄ρ / ∂ρ` as a dilatation field supported on `conformal_outside`.
pub fn derive_mu(rho: &ExplicitQCMap) -> Result<DilatationField> {
    let support = rho
        .conformal_outside
        .ok_or_else(|| Error::invalid(format!("{} is not conformal outside a compact box", rho.name)))?;
    let geometry = rho.geometry();
    let n = 64;
    let mut sup = 0.0f64;
    for j in 0..=n {
        for k in 0..=n {
            let x = support.x0 + support.width() * k as f64 / n as f64;
            let y = support.y0 + support.height() * j as f64 / n as f64;
            let z = geometry.to_plane(x, y);
            let dz = rho.wirtinger_z(z);
            if !(dz.norm() >= 1e-12) {
                return Err(Error::DegenerateDerivative(z.to_string()));
            }
            sup = sup.max((rho.wirtinger_zbar(z) / dz).norm());
        }
    }
    if !(sup < 1.0) {
        return Err(Error::invalid(format!("{} has sampled dilatation {sup} >= 1", rho.name)));
    }
    let r = rho.clone();
    let field = DilatationField::from_chart_fn(
        format!("mu[{}]", rho.name),
        move |x, y| {
            let z = geometry.to_plane(x, y);
            r.wirtinger_zbar(z) / r.wirtinger_z(z)
        },
        support,
        sup,
        geometry,
    )?;
    Ok(field.with_hot_spots(rho.hot_spots.clone()))
}

/// `g = f ∘ ρ` on the boundary parameter, with `f` given on points of `Γ`.
pub fn pullback_density<F>(f: F, rho: &ExplicitQCMap, window: (f64, f64)) -> Density
where
    F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
{
    let base = rho.base_curve();
    let r = rho.clone();
    Density::new(move |s| f(r.eval(base.point(s))), window)
}

/// `χ_E` pulled back, with `E = ρ([-1, 1])` on ℝ or the arc `ρ(e^{i[a, b]})` on the circle.
pub fn arc_indicator(rho: &ExplicitQCMap, a: f64, b: f64) -> Density {
    match rho.boundary {
        CurveDomain::RealLine => Density::indicator(a, b),
        CurveDomain::UnitCircle => {
            let (a, b) = (a.max(-PI), b.min(PI));
            Density::new(move |t| if t >= a && t <= b { 1.0.into() } else { 0.0.into() }, (-PI, PI)).with_breaks(vec![a, b])
        }
    }
}

/// `g(s) = ψ(s / h)` on `[-h, h]` of the boundary parameter.
pub fn smooth_bump_density(h: f64) -> Density {
    Density::new(move |s| psi(s / h).into(), (-h, h)).with_holder_hint(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<Complex64> {
        let mut v = Vec::new();
        for j in 0..9 {
            for k in 0..9 {
                v.push(Complex64::new(-1.1 + 0.27 * k as f64, -1.05 + 0.26 * j as f64));
            }
        }
        v
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let rho = ExplicitQCMap::bump(0.05).unwrap();
        assert!(rho.wirtinger_mismatch(&grid()) < 1e-4);
        rho.check_orientation(&grid()).unwrap();
        assert_eq!(rho.wirtinger_zbar(Complex64::new(1.5, 0.2)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn identity_has_zero_dilatation() {
        let mu = derive_mu(&ExplicitQCMap::identity()).unwrap();
        assert_eq!(mu.sup_bound(), 0.0);
        assert_eq!(mu.eval(Complex64::new(0.3, 0.2)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn bump_dilatation_matches_differences() {
        let rho = ExplicitQCMap::bump(0.05).unwrap();
        let mu = derive_mu(&rho).unwrap();
        for z in grid().into_iter().filter(|z| z.re.abs() < 1.0 && z.im.abs() < 1.0) {
            let (dz, dzbar) = fd_wirtinger(|w| rho.eval(w), z);
            assert!((mu.eval(z) - dzbar / dz).norm() < 1e-6);
        }
        assert!(mu.sup_bound() > 0.0 && mu.sup_bound() < 0.1);
    }

    #[test]
    fn affine_without_compact_support_is_refused() {
        let rho = ExplicitQCMap::affine(1.0.into(), 0.3.into(), 0.0.into()).unwrap();
        assert!(derive_mu(&rho).is_err());
        assert!(ExplicitQCMap::affine(1.0.into(), 1.0.into(), 0.0.into()).is_err());
    }

    #[test]
    fn pullbacks() {
        let id = ExplicitQCMap::identity();
        let g = pullback_density(|w| w * w, &id, (-1.0, 1.0));
        assert_eq!(g.eval(0.5), Complex64::new(0.25, 0.0));
        let rho = ExplicitQCMap::bump(0.05).unwrap();
        let one = pullback_density(|_| 1.0.into(), &rho, (-1.0, 1.0));
        assert_eq!(one.eval(0.3), Complex64::new(1.0, 0.0));
        let curve = rho.image_curve();
        assert!(curve.derivative_mismatch(&[-0.5, 0.0, 0.2, 0.7]) < 1e-5);
    }

    #[test]
    fn annulus_rect_containment() {
        let a = Region::Annulus { r_min: 1.0, r_max: 1.1 };
        assert!(a.contains_rect(&Rect::new(1.02, 1.05, -0.01, 0.01)));
        assert!(!a.contains_rect(&Rect::new(0.99, 1.05, -0.01, 0.01)));
        assert!(!a.contains_rect(&Rect::new(1.02, 1.09, 0.3, 0.5)));
    }
}
