use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::conditions::{condition1_with, condition2_with, condition3_ratio, default_probes, prop1_sweep, twb_sweep, Sweep};
use super::majorant::{default_heights, majorant_with, MajorantOptions};
use super::{DilatationField, Geometry};
use crate::error::Result;
use crate::quadrature::{DyadicOptions, IntegralVerdict};

pub const DEFAULT_SWEEP: [f64; 9] = [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 10.0, -10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportParams {
    pub tol: f64,
    /// Upper limit of the condition-1 integral; defaults to `min(half support height, 1/e)`.
    pub condition1_outer: Option<f64>,
    /// Upper limit of the dyadic part of condition 2; defaults to the support height.
    pub condition2_outer: Option<f64>,
    pub condition3_constant: f64,
    pub condition3_threshold: f64,
    pub probes: Option<Vec<Complex64>>,
    pub t_sweep: Vec<f64>,
    pub a_sweep: Vec<f64>,
    pub seed: u64,
}

impl Default for ReportParams {
    fn default() -> Self {
        ReportParams {
            tol: super::CONDITION_TOL,
            condition1_outer: None,
            condition2_outer: None,
            condition3_constant: 0.5,
            condition3_threshold: 100.0,
            probes: None,
            t_sweep: DEFAULT_SWEEP.to_vec(),
            a_sweep: DEFAULT_SWEEP.to_vec(),
            seed: MajorantOptions::default().seed,
        }
    }
}

/// Which routes make the field admissible; both may hold at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub via_condition1: bool,
    pub via_condition2: bool,
}

impl Admissibility {
    pub fn is_admissible(self) -> bool {
        self.via_condition1 || self.via_condition2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub field: String,
    pub geometry: Geometry,
    pub condition1: IntegralVerdict,
    pub condition2: IntegralVerdict,
    #[serde(with = "crate::serde_util::extended_f64_option")]
    pub condition3_ratio: Option<f64>,
    pub twb_sup_over_t: Sweep,
    pub prop1_sup_over_a: Sweep,
    pub admissibility: Admissibility,
    /// Engine failures that turned an entry inconclusive.
    pub failures: Vec<String>,
}

fn empty_sweep() -> Sweep {
    Sweep {
        sup: None,
        argmax: None,
        entries: Vec::new(),
    }
}

pub fn full_report(mu: &DilatationField, params: &ReportParams) -> ConditionReport {
    let opts = DyadicOptions::with_tol(params.tol);
    let mut failures = Vec::new();
    let mut keep = |what: &str, r: Result<IntegralVerdict>| match r {
        Ok(v) => v,
        Err(e) => {
            failures.push(format!("{what}: {e}"));
            IntegralVerdict::inconclusive(Vec::new())
        }
    };
    let s = mu.support();
    let height = mu.max_height();

    let outer1 = params
        .condition1_outer
        .unwrap_or_else(|| (0.5 * (s.y1 - s.y0)).min((-1.0f64).exp()));
    let majorant_opts = MajorantOptions {
        seed: params.seed,
        ..Default::default()
    };
    let condition1 = keep(
        "condition1",
        majorant_with(mu, &default_heights(mu), &majorant_opts).and_then(|m| condition1_with(&m, outer1, &opts)),
    );
    let outer2 = params.condition2_outer.unwrap_or(height);
    let condition2 = keep("condition2", condition2_with(mu, 0.0, outer2, &opts));
    let probes = params.probes.clone().unwrap_or_else(|| default_probes(mu));
    let condition3 = match condition3_ratio(mu, params.condition3_constant, &probes) {
        Ok(r) => Some(r),
        Err(e) => {
            failures.push(format!("condition3: {e}"));
            None
        }
    };
    let mut sweep = |what: &str, r: Result<Sweep>| match r {
        Ok(s) => s,
        Err(e) => {
            failures.push(format!("{what}: {e}"));
            empty_sweep()
        }
    };
    let twb = sweep("twb", twb_sweep(mu, &params.t_sweep, &opts));
    let prop1 = sweep("prop1", prop1_sweep(mu, &params.a_sweep, &opts));

    let admissibility = Admissibility {
        via_condition1: condition1.is_convergent(),
        via_condition2: condition2.is_convergent()
            && condition3.is_some_and(|r| r.is_finite() && r <= params.condition3_threshold),
    };
    ConditionReport {
        field: mu.name().to_string(),
        geometry: mu.geometry(),
        condition1,
        condition2,
        condition3_ratio: condition3,
        twb_sup_over_t: twb,
        prop1_sup_over_a: prop1,
        admissibility,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Rect;

    #[test]
    fn zero_field_is_admissible_with_zero_values() {
        let r = full_report(&DilatationField::zero(), &ReportParams::default());
        assert!(r.admissibility.is_admissible());
        assert_eq!(r.condition1.value().unwrap().re, 0.0);
        assert_eq!(r.condition2.value().unwrap().re, 0.0);
        assert_eq!(r.condition3_ratio, Some(0.0));
        assert_eq!(r.twb_sup_over_t.sup, Some(0.0));
        assert_eq!(r.prop1_sup_over_a.sup, Some(0.0));
        assert!(r.failures.is_empty());
    }

    #[test]
    fn log_field_fails_condition1() {
        let f = DilatationField::log_power(1.0, DilatationField::default_log_power_box()).unwrap();
        let params = ReportParams {
            t_sweep: vec![],
            a_sweep: vec![],
            ..Default::default()
        };
        let r = full_report(&f, &params);
        assert!(r.condition1.is_divergent(), "{:?}", r.condition1.kind);
        assert!(!r.admissibility.via_condition1);
    }

    #[test]
    fn power_law_admissible_via_condition2() {
        let f = DilatationField::power_law(0.75, Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        let params = ReportParams {
            t_sweep: vec![0.0],
            a_sweep: vec![0.0],
            ..Default::default()
        };
        let r = full_report(&f, &params);
        assert!(r.condition2.is_convergent());
        assert!(r.admissibility.via_condition2);
    }
}
