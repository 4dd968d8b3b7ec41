//! Improper integrals toward `t = 0` over dyadic shells `(2^-k-1 · outer, 2^-k · outer]`.
//!
//! Shell terms are summed outward-in and the tail is classified from the last
//! `K` shells:
//!
//! * geometric decay (all ratios below `decay_ratio`, nearly constant) gives a
//!   convergent verdict with a geometric tail estimate;
//! * terms that never decrease give a divergent verdict;
//! * otherwise the terms are fitted to the logarithmic model `c / (t λ(t)^p)`,
//!   `λ(t) = max(1, ln(1/outer)) + ln(outer/t)`, and `p` decides. A plain ratio
//!   test cannot separate `1/(t ln t)` from `1/(t ln² t)`; the fitted exponent can.
//!
//! All of this is a heuristic: a verdict is evidence, not a proof.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{integrate_1d_with, QuadOptions, QuadratureResult};
use crate::error::{Error, Result};

const TINY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicOptions {
    pub tol: f64,
    /// Number of trailing shells inspected by the classifier (K).
    pub window: usize,
    pub decay_ratio: f64,
    /// Allowed spread of shell ratios for the geometric test.
    pub ratio_spread: f64,
    pub min_shells: usize,
    /// Shells required before a divergent or logarithmic-model verdict.
    pub model_min_shells: usize,
    pub max_shells: usize,
    pub convergent_exponent: f64,
    pub divergent_exponent: f64,
}

impl Default for DyadicOptions {
    fn default() -> Self {
        DyadicOptions {
            tol: super::DEFAULT_TOL_1D,
            window: 8,
            decay_ratio: 0.9,
            ratio_spread: 0.05,
            min_shells: 10,
            model_min_shells: 40,
            max_shells: 200,
            convergent_exponent: 1.5,
            divergent_exponent: 1.2,
        }
    }
}

impl DyadicOptions {
    pub fn with_tol(tol: f64) -> Self {
        DyadicOptions { tol, ..Default::default() }
    }

    /// Options for an individual shell integral.
    pub fn shell_quad(&self) -> QuadOptions {
        QuadOptions {
            tol: self.tol / 64.0,
            rel_tol: 1e-12,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellTerm {
    pub outer: f64,
    pub inner: f64,
    pub term: Complex64,
    pub partial_sum: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum VerdictKind {
    Convergent { value: Complex64, error: f64 },
    Divergent { growth_trace: Vec<f64> },
    Inconclusive { partial_sums: Vec<Complex64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralVerdict {
    pub kind: VerdictKind,
    pub dyadic_trace: Vec<ShellTerm>,
}

impl IntegralVerdict {
    /// A convergent verdict with no trace, for quantities that vanish identically.
    pub fn exact(value: Complex64) -> Self {
        IntegralVerdict {
            kind: VerdictKind::Convergent { value, error: 0.0 },
            dyadic_trace: Vec::new(),
        }
    }

    pub fn inconclusive(partial_sums: Vec<Complex64>) -> Self {
        IntegralVerdict {
            kind: VerdictKind::Inconclusive { partial_sums },
            dyadic_trace: Vec::new(),
        }
    }

    pub fn from_quadrature(r: &QuadratureResult) -> Self {
        if r.converged {
            IntegralVerdict::exact(r.value).with_error(r.abs_error_estimate)
        } else {
            IntegralVerdict::inconclusive(vec![r.value])
        }
    }

    fn with_error(mut self, e: f64) -> Self {
        if let VerdictKind::Convergent { error, .. } = &mut self.kind {
            *error = e;
        }
        self
    }

    pub fn is_convergent(&self) -> bool {
        matches!(self.kind, VerdictKind::Convergent { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.kind, VerdictKind::Divergent { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.kind, VerdictKind::Inconclusive { .. })
    }

    pub fn value(&self) -> Option<Complex64> {
        match self.kind {
            VerdictKind::Convergent { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn error(&self) -> Option<f64> {
        match self.kind {
            VerdictKind::Convergent { error, .. } => Some(error),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            VerdictKind::Convergent { .. } => "Convergent",
            VerdictKind::Divergent { .. } => "Divergent",
            VerdictKind::Inconclusive { .. } => "Inconclusive",
        }
    }

    /// Multiplies every value in the verdict by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let kind = match &self.kind {
            VerdictKind::Convergent { value, error } => VerdictKind::Convergent {
                value: value * k,
                error: error * k.abs(),
            },
            VerdictKind::Divergent { growth_trace } => VerdictKind::Divergent {
                growth_trace: growth_trace.iter().map(|g| g * k.abs()).collect(),
            },
            VerdictKind::Inconclusive { partial_sums } => VerdictKind::Inconclusive {
                partial_sums: partial_sums.iter().map(|p| p * k).collect(),
            },
        };
        let dyadic_trace = self
            .dyadic_trace
            .iter()
            .map(|s| ShellTerm {
                term: s.term * k,
                partial_sum: s.partial_sum * k,
                error: s.error * k.abs(),
                ..s.clone()
            })
            .collect();
        IntegralVerdict { kind, dyadic_trace }
    }

    /// Sum of two verdicts over disjoint ranges.
    pub fn combine(&self, other: &IntegralVerdict) -> IntegralVerdict {
        let mut dyadic_trace = self.dyadic_trace.clone();
        dyadic_trace.extend(other.dyadic_trace.iter().cloned());
        let kind = match (&self.kind, &other.kind) {
            (VerdictKind::Divergent { growth_trace }, _) | (_, VerdictKind::Divergent { growth_trace }) => {
                VerdictKind::Divergent { growth_trace: growth_trace.clone() }
            }
            (VerdictKind::Convergent { value: a, error: ea }, VerdictKind::Convergent { value: b, error: eb }) => {
                VerdictKind::Convergent { value: a + b, error: ea + eb }
            }
            _ => {
                let mut partial_sums = Vec::new();
                for k in [&self.kind, &other.kind] {
                    match k {
                        VerdictKind::Convergent { value, .. } => partial_sums.push(*value),
                        VerdictKind::Inconclusive { partial_sums: p } => partial_sums.extend(p.iter().copied()),
                        VerdictKind::Divergent { .. } => {}
                    }
                }
                VerdictKind::Inconclusive { partial_sums }
            }
        };
        IntegralVerdict { kind, dyadic_trace }
    }
}

pub fn improper_dyadic<F>(f: F, inner: f64, outer: f64, tol: f64) -> Result<IntegralVerdict>
where
    F: Fn(f64) -> Complex64,
{
    improper_dyadic_with(f, inner, outer, &DyadicOptions::with_tol(tol))
}

/// `∫_0^outer f(t) dt` by dyadic shells; shells stop once they would reach below `inner`.
pub fn improper_dyadic_with<F>(f: F, inner: f64, outer: f64, opts: &DyadicOptions) -> Result<IntegralVerdict>
where
    F: Fn(f64) -> Complex64,
{
    let quad = opts.shell_quad();
    dyadic_shells(|lo, hi| integrate_1d_with(&f, lo, hi, &[], &quad), inner, outer, opts)
}

/// Drives the shell loop with a caller-supplied shell integral `shell(lo, hi)`.
pub fn dyadic_shells<S>(mut shell: S, inner: f64, outer: f64, opts: &DyadicOptions) -> Result<IntegralVerdict>
where
    S: FnMut(f64, f64) -> Result<QuadratureResult>,
{
    if !(outer > 0.0 && outer.is_finite()) || !(inner >= 0.0 && inner < outer) {
        return Err(Error::invalid(format!("dyadic range needs 0 <= inner < outer, got inner={inner}, outer={outer}")));
    }
    if !(opts.tol > 0.0) || opts.window < 2 {
        return Err(Error::invalid("dyadic options need tol > 0 and window >= 2"));
    }
    let mut trace: Vec<ShellTerm> = Vec::new();
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..opts.max_shells {
        let hi = outer * 0.5f64.powi(k as i32);
        let lo = hi * 0.5;
        if lo < inner || lo <= 0.0 {
            break;
        }
        let r = shell(lo, hi)?;
        if !(r.value.re.is_finite() && r.value.im.is_finite()) {
            return Err(Error::non_finite(format!("shell ({lo}, {hi}]")));
        }
        sum += r.value;
        trace.push(ShellTerm {
            outer: hi,
            inner: lo,
            term: r.value,
            partial_sum: sum,
            error: r.abs_error_estimate,
        });
        if let Some(kind) = decide(&trace, outer, opts, false) {
            return Ok(IntegralVerdict { kind, dyadic_trace: trace });
        }
    }
    let kind = decide(&trace, outer, opts, true).expect("final classification always decides");
    Ok(IntegralVerdict { kind, dyadic_trace: trace })
}

/// Classifies an already computed list of shell terms, as if no further shells were available.
pub fn classify_shells(trace: Vec<ShellTerm>, outer: f64, opts: &DyadicOptions) -> IntegralVerdict {
    let kind = decide(&trace, outer, opts, true).expect("final classification always decides");
    IntegralVerdict { kind, dyadic_trace: trace }
}

fn log_scale(outer: f64, k: usize) -> f64 {
    (1.0f64).max((1.0 / outer).ln()) + k as f64 * std::f64::consts::LN_2
}

/// `∫_{λ0}^{λ1} λ^-p dλ`.
fn model_mass(l0: f64, l1: f64, p: f64) -> f64 {
    let q = p - 1.0;
    if q.abs() < 1e-9 {
        (l1 / l0).ln()
    } else {
        (l0.powf(-q) - l1.powf(-q)) / q
    }
}

/// `∫_{λ}^∞ λ^-p dλ` for `p > 1`.
fn model_tail(l: f64, p: f64) -> f64 {
    let q = p - 1.0;
    l.powf(-q) / q
}

/// Fits the exponent `p` of the logarithmic model to the decay between two shells.
fn fit_exponent(outer: f64, first: usize, last: usize, observed_ratio: f64) -> f64 {
    let ratio = |p: f64| {
        model_mass(log_scale(outer, first), log_scale(outer, first + 1), p)
            / model_mass(log_scale(outer, last), log_scale(outer, last + 1), p)
    };
    let (mut lo, mut hi) = (-4.0, 16.0);
    if observed_ratio <= ratio(lo) {
        return lo;
    }
    if observed_ratio >= ratio(hi) {
        return hi;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < observed_ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn extrapolate_model(trace: &[ShellTerm], n: usize, outer: f64, p: f64) -> Complex64 {
    let last = &trace[n - 1];
    let mass = model_mass(log_scale(outer, n - 1), log_scale(outer, n), p);
    last.partial_sum + last.term * (model_tail(log_scale(outer, n), p) / mass)
}

fn decide(trace: &[ShellTerm], outer: f64, opts: &DyadicOptions, last_chance: bool) -> Option<VerdictKind> {
    let n = trace.len();
    let k = opts.window;
    let quad_err: f64 = trace.iter().map(|s| s.error).sum();
    let sum = trace.last().map(|s| s.partial_sum).unwrap_or_default();
    let inconclusive = || VerdictKind::Inconclusive {
        partial_sums: trace.iter().map(|s| s.partial_sum).collect(),
    };
    if n < k + 1 || (n < opts.min_shells && !last_chance) {
        if !last_chance {
            return None;
        }
        if n > 0 && trace.iter().all(|s| s.term.norm() <= TINY) {
            return Some(VerdictKind::Convergent { value: sum, error: quad_err });
        }
        return Some(inconclusive());
    }

    let window = &trace[n - k - 1..];
    let mags: Vec<f64> = window.iter().map(|s| s.term.norm()).collect();
    if mags.iter().all(|&m| m <= TINY) {
        return Some(VerdictKind::Convergent { value: sum, error: quad_err });
    }
    let positive = mags.iter().all(|&m| m > TINY);

    if positive {
        let ratios: Vec<f64> = mags.windows(2).map(|w| w[1] / w[0]).collect();
        let rmax = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let rmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        // slow geometric decay has constant ratios; logarithmic decay drifts towards 1
        let slow_geometric = n >= opts.model_min_shells && rmax < 1.0 - 1e-3 && rmax - rmin <= 0.01 * (1.0 - rmax);
        if (rmax <= opts.decay_ratio && rmax - rmin <= opts.ratio_spread) || slow_geometric {
            let last = &trace[n - 1];
            let r_last = *ratios.last().unwrap();
            let bound = mags[k] * rmax / (1.0 - rmax);
            if bound <= opts.tol / 2.0 || last_chance {
                return Some(VerdictKind::Convergent {
                    value: sum + last.term * (r_last / (1.0 - r_last)),
                    error: quad_err + bound,
                });
            }
            return None;
        }
    }

    if n < opts.model_min_shells && !last_chance {
        return None;
    }
    let growth_trace = || mags[1..].to_vec();
    if positive && mags.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)) {
        return Some(VerdictKind::Divergent { growth_trace: growth_trace() });
    }
    if positive {
        let observed = mags[1] / mags[k];
        let p = fit_exponent(outer, n - k, n - 1, observed);
        if p >= opts.convergent_exponent {
            let value = extrapolate_model(trace, n, outer, p);
            let half = extrapolate_model(trace, n / 2, outer, p);
            let back = extrapolate_model(trace, n - k, outer, p);
            let spread = (value - half).norm().max((value - back).norm());
            return Some(VerdictKind::Convergent {
                value,
                error: quad_err + spread + 1e-12 * value.norm(),
            });
        }
        if p <= opts.divergent_exponent {
            return Some(VerdictKind::Divergent { growth_trace: growth_trace() });
        }
    }
    if last_chance {
        Some(inconclusive())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn log_squared_converges_to_one() {
        let v = improper_dyadic(|t| c(1.0 / (t * (1.0 / t).ln().powi(2))), 0.0, 1.0 / E, 1e-8).unwrap();
        let value = v.value().expect("convergent");
        assert!((value.re - 1.0).abs() < 1e-6, "{value}");
        assert!(!v.dyadic_trace.is_empty());
    }

    #[test]
    fn log_reciprocal_diverges() {
        let v = improper_dyadic(|t| c(1.0 / (t * (1.0 / t).ln())), 0.0, 1.0 / E, 1e-8).unwrap();
        assert!(v.is_divergent(), "{:?}", v.kind);
    }

    #[test]
    fn linear_converges_to_half() {
        let v = improper_dyadic(|t| c(t), 0.0, 1.0, 1e-10).unwrap();
        let value = v.value().expect("convergent");
        assert!((value.re - 0.5).abs() < 1e-10);
        assert!(v.error().unwrap() <= 1e-9);
    }

    #[test]
    fn slow_geometric_tail_is_summed() {
        let v = improper_dyadic(|t| c(t.powf(-0.9)), 0.0, 1.0, 1e-9).unwrap();
        let value = v.value().expect("convergent");
        assert!((value.re - 10.0).abs() < 1e-9, "{value}");
    }

    #[test]
    fn reciprocal_diverges() {
        let v = improper_dyadic(|t| c(1.0 / t), 0.0, 1.0, 1e-8).unwrap();
        assert!(v.is_divergent());
    }

    #[test]
    fn zero_integrand_is_convergent_zero() {
        let v = improper_dyadic(|_| c(0.0), 0.0, 1.0, 1e-8).unwrap();
        assert_eq!(v.value(), Some(c(0.0)));
    }

    #[test]
    fn inner_floor_limits_shells() {
        let v = improper_dyadic(|t| c(t), 0.25, 1.0, 1e-8).unwrap();
        assert_eq!(v.dyadic_trace.len(), 2);
        assert!(v.is_inconclusive());
    }

    #[test]
    fn exponent_fit_recovers_model() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let outer = 1.0 / E;
            let l = |k: usize| log_scale(outer, k);
            let observed = model_mass(l(40), l(41), p) / model_mass(l(47), l(48), p);
            assert!((fit_exponent(outer, 40, 47, observed) - p).abs() < 1e-6);
        }
    }
}
