//! Cauchy principal values by symmetric excision.
//!
//! Around the singularity `s` the integrand is folded, `g(u) = f(s + u) + f(s - u)`,
//! which cancels the simple pole. The excised integrals `J(ε) = ∫_ε^δ g` are taken
//! on a halving sequence of `ε`, and since `g` is even in `u` the defect
//! `J(0) - J(ε)` expands in odd powers of `ε`; Richardson extrapolation removes
//! them one at a time.

use num_complex::Complex64;

use super::{integrate_1d_with, QuadOptions, QuadratureResult};
use crate::error::{Error, Result};

const MAX_LEVELS: usize = 24;
const MIN_LEVELS: usize = 3;

pub fn integrate_pv<F>(f: F, singularity: f64, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_pv_with(f, singularity, a, b, &QuadOptions::with_tol(tol))
}

pub fn integrate_pv_with<F>(f: F, s: f64, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(a < s && s < b) {
        return Err(Error::invalid(format!("singularity {s} must lie strictly inside ({a}, {b})")));
    }
    let delta = (s - a).min(b - s);
    let part_opts = QuadOptions { tol: opts.tol / 8.0, ..*opts };

    let mut total = QuadratureResult::zero();
    let absorb = |r: QuadratureResult, total: &mut QuadratureResult| {
        total.value += r.value;
        total.abs_error_estimate += r.abs_error_estimate;
        total.evaluations += r.evaluations;
        total.converged &= r.converged;
    };
    if s - delta > a {
        absorb(integrate_1d_with(&f, a, s - delta, &[], &part_opts)?, &mut total);
    }
    if s + delta < b {
        absorb(integrate_1d_with(&f, s + delta, b, &[], &part_opts)?, &mut total);
    }

    let folded = |u: f64| f(s + u) + f(s - u);
    let eps0 = delta / 4.0;
    let level_opts = QuadOptions { tol: opts.tol / 16.0, ..*opts };
    let first = integrate_1d_with(folded, eps0, delta, &[], &part_opts)?;
    absorb(
        QuadratureResult { value: Complex64::new(0.0, 0.0), ..first.clone() },
        &mut total,
    );

    // Richardson table, one row per excision radius eps0 * 2^-k.
    let mut rows: Vec<Vec<Complex64>> = vec![vec![first.value]];
    let mut j = first.value;
    let mut eps = eps0;
    let mut spread = f64::INFINITY;
    for k in 1..MAX_LEVELS {
        let next = eps / 2.0;
        let piece = integrate_1d_with(folded, next, eps, &[], &level_opts)?;
        total.abs_error_estimate += piece.abs_error_estimate;
        total.evaluations += piece.evaluations;
        total.converged &= piece.converged;
        j += piece.value;
        eps = next;

        let prev = &rows[k - 1];
        let mut row = Vec::with_capacity(k + 1);
        row.push(j);
        for m in 1..=k {
            let order = (2 * m - 1) as i32;
            let factor = 2f64.powi(order) - 1.0;
            let v = row[m - 1] + (row[m - 1] - prev[m - 1]) / factor;
            row.push(v);
        }
        let diag = row[k];
        let d = (diag - rows[k - 1][k - 1]).norm();
        spread = spread.min(d);
        rows.push(row);
        if k >= MIN_LEVELS && d <= opts.tol / 2.0 {
            total.value += diag;
            total.abs_error_estimate += d;
            total.converged &= total.abs_error_estimate <= opts.tol.max(opts.rel_tol * total.value.norm());
            return Ok(total);
        }
    }
    Err(Error::NoConvergence { spread })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn odd_kernel_vanishes() {
        let r = integrate_pv(|x| c(1.0 / x), 0.0, -1.0, 1.0, 1e-10).unwrap();
        assert!(r.value.norm() < 1e-10);
    }

    #[test]
    fn pole_plus_constant() {
        let r = integrate_pv(|x| c((1.0 + x) / x), 0.0, -1.0, 1.0, 1e-10).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-10);
    }

    #[test]
    fn shifted_symmetric_interval() {
        let r = integrate_pv(|x| c(1.0 / (x - 1.0)), 1.0, 0.0, 2.0, 1e-10).unwrap();
        assert!(r.value.norm() < 1e-10);
    }

    #[test]
    fn asymmetric_interval() {
        // PV ∫_{-1}^{3} dx/x = ln 3
        let r = integrate_pv(|x| c(1.0 / x), 0.0, -1.0, 3.0, 1e-10).unwrap();
        assert!((r.value.re - 3f64.ln()).abs() < 1e-9, "{}", r.value.re);
    }

    #[test]
    fn smooth_integrand_matches_plain_quadrature() {
        let f = |x: f64| Complex64::new(x.cos(), x * x);
        let pv = integrate_pv(f, 0.3, -1.0, 2.0, 1e-10).unwrap();
        let plain = super::super::integrate_1d(f, -1.0, 2.0, 1e-10).unwrap();
        assert!((pv.value - plain.value).norm() < 1e-9);
    }

    #[test]
    fn endpoint_singularity_rejected() {
        assert!(integrate_pv(|x| c(x), 0.0, 0.0, 1.0, 1e-8).is_err());
    }
}
