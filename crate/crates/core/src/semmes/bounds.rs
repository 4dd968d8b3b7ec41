//! Dominating integrals for `H` on a small square, and the reverse Hölder ratio.
//!
//! The square `Q` of side `l_Q` is split into a core near the point and a Whitney
//! annulus. Hölder with exponents `p₀ = 2p`, `q₀ = p₀/(p₀ - 1)` on each Whitney cube,
//! together with the reverse Hölder inequality for the Jacobian, reduces both parts
//! to one integral over heights `|y| <= l_Q/2`:
//! `∫ μ*(t)/|t| · ln(1/|t|) dt` under condition 1 and `∫ σ(y)/|y|^{3/2} dy` under
//! condition 2. Those integrals are what is computed here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ExplicitQCMap;
use crate::dilatation::{condition1_with, condition2_strip, default_heights, majorant, DilatationField, CONDITION_TOL};
use crate::error::{Error, Result};
use crate::quadrature::{DyadicOptions, IntegralVerdict, Rect, TensorRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    Cond1,
    Cond2,
}

fn finite_value(v: IntegralVerdict) -> Result<f64> {
    if v.is_divergent() {
        return Ok(f64::INFINITY);
    }
    v.value()
        .map(|c| c.re)
        .ok_or_else(|| Error::invalid(format!("dominating integral is {}", v.label())))
}

/// The dominating integral over `|t| <= l_Q / 2`; `+∞` when it diverges.
pub fn lemma1_bounds(mu: &DilatationField, l_q: f64, mode: BoundMode) -> Result<f64> {
    if !(l_q > 0.0 && l_q < 2.0) {
        return Err(Error::invalid(format!("l_Q must lie in (0, 2), got {l_q}")));
    }
    let half = 0.5 * l_q;
    let opts = DyadicOptions::with_tol(CONDITION_TOL);
    match mode {
        BoundMode::Cond1 => {
            let m = majorant(mu, &default_heights(mu))?;
            if m.is_zero() {
                return Ok(0.0);
            }
            Ok(2.0 * finite_value(condition1_with(&m, half, &opts)?)?)
        }
        BoundMode::Cond2 => finite_value(condition2_strip(mu, 0.0, half, &opts)?),
    }
}

/// A side `l_Q` with `lemma1_bounds(μ, l_Q) <= δ/2`, found by halving from 1 and a
/// few bisection steps toward the largest such side. Returns `(l_Q, bound)`.
pub fn lemma1_solve(mu: &DilatationField, delta: f64, mode: BoundMode) -> Result<(f64, f64)> {
    if !(delta > 0.0) {
        return Err(Error::invalid(format!("δ must be positive, got {delta}")));
    }
    let target = 0.5 * delta;
    let mut l = 1.0;
    let mut b = lemma1_bounds(mu, l, mode)?;
    if b <= target {
        return Ok((l, b));
    }
    let mut halvings = 0;
    while b > target {
        halvings += 1;
        if halvings > 200 {
            return Err(Error::NoConvergence { spread: b });
        }
        l *= 0.5;
        b = lemma1_bounds(mu, l, mode)?;
    }
    let (mut lo, mut hi) = (l, 2.0 * l);
    for _ in 0..6 {
        let mid = 0.5 * (lo + hi);
        let bm = lemma1_bounds(mu, mid, mode)?;
        if bm <= target {
            lo = mid;
            b = bm;
        } else {
            hi = mid;
        }
    }
    Ok((lo, b))
}

/// `(mean_Q J^p)^{1/p} / mean_Q J` for the Jacobian `J = |∂ρ|² - |∂̄ρ|²`.
///
/// `J` is divided by its value at the first node before averaging, which makes
/// the ratio exactly 1 for constant Jacobians.
pub fn reverse_holder_ratio(rho: &ExplicitQCMap, q: Rect, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("exponent p must exceed 1, got {p}")));
    }
    if !q.is_valid() {
        return Err(Error::invalid(format!("box {q:?} is degenerate")));
    }
    let doubled = Rect::new(
        q.x0 - 0.5 * q.width(),
        q.x1 + 0.5 * q.width(),
        q.y0 - 0.5 * q.height(),
        q.y1 + 0.5 * q.height(),
    );
    if !rho.domain_of_validity().contains_rect(&doubled) {
        return Err(Error::invalid(format!("2Q = {doubled:?} leaves the domain of validity")));
    }
    let rule = TensorRule::new(q, 4, 8);
    let mut jac = Vec::with_capacity(rule.points.len());
    for &(x, y) in &rule.points {
        let z = Complex64::new(x, y);
        let j = rho.jacobian(z);
        if !(j > 0.0 && j.is_finite()) {
            return Err(Error::NegativeJacobian(z.to_string()));
        }
        jac.push(j);
    }
    let reference = jac[0];
    let scaled: Vec<f64> = jac.iter().map(|j| j / reference).collect();
    let powered: Vec<f64> = scaled.iter().map(|v| v.powf(p)).collect();
    Ok(rule.mean_of(&powered).powf(1.0 / p) / rule.mean_of(&scaled))
}
