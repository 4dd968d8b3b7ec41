use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_mu, ExplicitQCMap};
use crate::cauchy::{cauchy_derivative_result, cauchy_transform_result, principal_value, Density};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_2d_with, QuadOptions, QuadratureResult, TensorRule};

pub const FORMULA_TOL: f64 = 1e-6;
const GAP_FLOOR: f64 = 1e-4;
const SLACK: f64 = 2.0;

fn transform_opts() -> QuadOptions {
    QuadOptions {
        tol: 1e-11,
        rel_tol: 0.0,
        ..Default::default()
    }
}

fn difference(a: QuadratureResult, b: QuadratureResult) -> QuadratureResult {
    QuadratureResult {
        value: a.value - b.value,
        abs_error_estimate: a.abs_error_estimate + b.abs_error_estimate,
        evaluations: a.evaluations + b.evaluations,
        converged: a.converged && b.converged,
    }
}

/// `H(z₀) = C_Γ(f)(ρ(z₀)) - C_B(g)(z₀)`; on `B` itself the `+` boundary values are used.
pub fn h_direct(rho: &ExplicitQCMap, g: &Density, z0: Complex64) -> Result<QuadratureResult> {
    let geometry = rho.geometry();
    let base = rho.base_curve();
    let image = rho.image_curve();
    if geometry.boundary_distance(z0) == 0.0 {
        // the ±g/2 terms of both boundary values cancel
        let (s, _) = geometry.to_chart(z0);
        return Ok(difference(principal_value(&image, g, s)?, principal_value(&base, g, s)?));
    }
    let opts = transform_opts();
    Ok(difference(
        cauchy_transform_result(&image, g, rho.eval(z0), &opts)?,
        cauchy_transform_result(&base, g, z0, &opts)?,
    ))
}

/// `∂G(z) = C'_Γ(f)(ρ(z)) ∂ρ(z)`.
fn dg(rho: &ExplicitQCMap, image: &crate::geometry::ParametrizedCurve, g: &Density, z: Complex64) -> Result<Complex64> {
    let d = rho.geometry().boundary_distance(z).min(1.0);
    let opts = QuadOptions {
        tol: 1e-12 / d.max(1e-12),
        rel_tol: 1e-12,
        max_evals: 400_000,
    };
    Ok(cauchy_derivative_result(image, g, rho.eval(z), &opts)?.value * rho.wirtinger_z(z))
}

/// `H(z₀) = -(1/π) ∬ μ(z) ∂G(z) / (z - z₀) dA(z)` over the support of `μ`.
pub fn h_via_formula(rho: &ExplicitQCMap, g: &Density, z0: Complex64) -> Result<QuadratureResult> {
    let mu = derive_mu(rho)?;
    if mu.sup_bound() == 0.0 {
        return Ok(QuadratureResult::zero());
    }
    let geometry = mu.geometry();
    let support = mu.support();
    let image = rho.image_curve();
    let (x0, y0) = geometry.to_chart(z0);
    let mut x_breaks = vec![x0];
    x_breaks.extend_from_slice(mu.hot_spots());
    let y_breaks = [0.0, y0];
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let integrand = |x: f64, y: f64| -> Complex64 {
        let m = mu.eval_chart(x, y);
        if m == Complex64::new(0.0, 0.0) {
            return m;
        }
        let z = geometry.to_plane(x, y);
        match dg(rho, &image, g, z) {
            Ok(d) => -m * d / (z - z0) * (geometry.area_weight(y) / PI),
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let opts = QuadOptions {
        tol: FORMULA_TOL,
        ..Default::default()
    };
    let r = integrate_2d_with(integrand, support, &x_breaks, &y_breaks, &opts)?;
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// `(1/π) ∬ |μ(z)| / |z - z₀| dA(z)`.
fn weighted_mu(rho: &ExplicitQCMap, z0: Complex64) -> Result<f64> {
    let mu = derive_mu(rho)?;
    if mu.sup_bound() == 0.0 {
        return Ok(0.0);
    }
    let geometry = mu.geometry();
    let (x0, y0) = geometry.to_chart(z0);
    let r = integrate_2d_with(
        |x, y| {
            let z = geometry.to_plane(x, y);
            Complex64::new(mu.eval_chart(x, y).norm() / (z - z0).norm() * geometry.area_weight(y) / PI, 0.0)
        },
        mu.support(),
        &[x0],
        &[0.0, y0],
        &QuadOptions::with_tol(FORMULA_TOL),
    )?;
    Ok(r.value.re)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub probe: Complex64,
    pub on_boundary: bool,
    pub h_direct: Complex64,
    pub h_formula: Complex64,
    pub gap: f64,
    /// `max(1e-4, 10 × summed quadrature error estimates)`.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// Largest `|∂G|` over a tensor grid on the support of `μ`.
    #[serde(with = "crate::serde_util::extended_f64")]
    pub dg_sup: f64,
    /// Largest `(1/π) ∬ |μ| / |z - z₀|` over the probes.
    pub weighted_mu: f64,
    /// `dg_sup × weighted_mu`.
    #[serde(with = "crate::serde_util::extended_f64")]
    pub bound_from_conditions: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub map: String,
    pub probes: Vec<ProbeRow>,
    /// Plane probes dropped for sitting within `1e-3 × diam` of the boundary or
    /// outside the domain of validity of `ρ`.
    pub excluded: Vec<Complex64>,
    pub sup_h_on_line: f64,
    pub sup_h_off_line: f64,
    pub max_gap: f64,
    pub bounds: Bounds,
    pub verdict: Verdict,
    pub failures: Vec<String>,
}

fn probe_row(rho: &ExplicitQCMap, g: &Density, z0: Complex64, on_boundary: bool) -> Result<(ProbeRow, f64)> {
    let direct = h_direct(rho, g, z0)?;
    let formula = h_via_formula(rho, g, z0)?;
    let weighted = weighted_mu(rho, z0)?;
    let gap = (direct.value - formula.value).norm();
    Ok((
        ProbeRow {
            probe: z0,
            on_boundary,
            h_direct: direct.value,
            h_formula: formula.value,
            gap,
            tolerance: GAP_FLOOR.max(10.0 * (direct.abs_error_estimate + formula.abs_error_estimate)),
        },
        weighted,
    ))
}

fn dg_sup(rho: &ExplicitQCMap, g: &Density) -> Result<f64> {
    let mu = derive_mu(rho)?;
    if mu.sup_bound() == 0.0 {
        return Ok(0.0);
    }
    let geometry = mu.geometry();
    let image = rho.image_curve();
    let rule = TensorRule::new(mu.support(), 4, 6);
    let values = rule
        .points
        .par_iter()
        .map(|&(x, y)| dg(rho, &image, g, geometry.to_plane(x, y)).map(|v| v.norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Evaluates `H` both ways at boundary parameters `line_probes` and at
/// `plane_probes`, and compares `sup |H|` with a bound built from `μ`.
pub fn theorem1_report(rho: &ExplicitQCMap, g: &Density, line_probes: &[f64], plane_probes: &[Complex64]) -> Theorem1Report {
    let geometry = rho.geometry();
    let diam = rho
        .conformal_outside()
        .map(|r| {
            let a = geometry.to_plane(r.x0, r.y0);
            let b = geometry.to_plane(r.x1, r.y1);
            (a - b).norm().max(r.width().hypot(r.height()))
        })
        .unwrap_or(1.0);
    let mut points: Vec<(Complex64, bool)> = line_probes.iter().map(|&s| (geometry.to_plane(s, 0.0), true)).collect();
    let mut excluded = Vec::new();
    for &z in plane_probes {
        if geometry.boundary_distance(z) < 1e-3 * diam || !rho.domain_of_validity().contains(z) {
            excluded.push(z);
        } else {
            points.push((z, false));
        }
    }
    let results: Vec<Result<(ProbeRow, f64)>> = points.par_iter().map(|&(z, on)| probe_row(rho, g, z, on)).collect();
    let mut failures = Vec::new();
    let mut probes = Vec::new();
    let mut weighted = 0.0f64;
    for ((z, _), r) in points.iter().zip(results) {
        match r {
            Ok((row, w)) => {
                weighted = weighted.max(w);
                probes.push(row);
            }
            Err(e) => failures.push(format!("probe {z}: {e}")),
        }
    }
    let dg = match dg_sup(rho, g) {
        Ok(v) => v,
        Err(e) => {
            failures.push(format!("dg_sup: {e}"));
            f64::NAN
        }
    };
    let sup_of = |on: bool| probes.iter().filter(|p| p.on_boundary == on).map(|p| p.h_direct.norm()).fold(0.0, f64::max);
    let sup_h_on_line = sup_of(true);
    let sup_h_off_line = sup_of(false);
    let max_gap = probes.iter().map(|p| p.gap).fold(0.0, f64::max);
    let bound = dg * weighted;
    let verdict = if !failures.is_empty() {
        Verdict::Inconclusive
    } else if probes.iter().all(|p| p.gap < p.tolerance) && sup_h_on_line.max(sup_h_off_line) <= SLACK * bound + 1e-12 {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    Theorem1Report {
        map: rho.name().to_string(),
        probes,
        excluded,
        sup_h_on_line,
        sup_h_off_line,
        max_gap,
        bounds: Bounds {
            dg_sup: dg,
            weighted_mu: weighted,
            bound_from_conditions: bound,
            slack: SLACK,
        },
        verdict,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semmes::{arc_indicator, smooth_bump_density};

    #[test]
    fn identity_gives_zero() {
        let rho = ExplicitQCMap::identity();
        let g = arc_indicator(&rho, -1.0, 1.0);
        for z in [Complex64::new(0.3, 0.4), Complex64::new(-2.0, -0.1)] {
            assert_eq!(h_direct(&rho, &g, z).unwrap().value, Complex64::new(0.0, 0.0));
            assert_eq!(h_via_formula(&rho, &g, z).unwrap().value, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn translation_gives_zero() {
        let one = Complex64::new(1.0, 0.0);
        let rho = ExplicitQCMap::affine(one, 0.0.into(), one).unwrap();
        let g = arc_indicator(&rho, -1.0, 1.0);
        let h = h_direct(&rho, &g, Complex64::new(0.2, 0.7)).unwrap();
        assert!(h.value.norm() < 1e-12);
    }

    #[test]
    fn bump_cross_validates() {
        let rho = ExplicitQCMap::bump(0.05).unwrap();
        let g = smooth_bump_density(1.5);
        for z in [Complex64::new(0.3, 0.4), Complex64::new(1.4, -0.6), Complex64::new(-0.2, 0.0)] {
            let d = h_direct(&rho, &g, z).unwrap();
            let f = h_via_formula(&rho, &g, z).unwrap();
            assert!((d.value - f.value).norm() < 1e-4, "{z}: {} vs {}", d.value, f.value);
            assert!(d.value.norm() > 1e-4);
        }
    }
}
