use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dilatation::{ConditionReport, Sweep};
use crate::error::{Error, Result};
use crate::example5::Dossier;
use crate::geometry::WhitneyCube;
use crate::quadrature::{IntegralVerdict, Rect, VerdictKind};
use crate::semmes::Theorem1Report;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Consistent,
    Inconsistent,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Consistent => 0,
            Status::Inconsistent => 2,
            Status::Inconclusive => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Consistent => "consistent",
            Status::Inconsistent => "inconsistent",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwbReport {
    pub field: String,
    pub twb: Sweep,
    pub prop1: Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformRow {
    pub z: Complex64,
    pub value: Complex64,
    pub abs_error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpRow {
    pub s: f64,
    pub plus: Complex64,
    pub minus: Complex64,
    pub jump: Complex64,
    pub density: Complex64,
    /// `|jump - density|`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyReport {
    pub curve: String,
    pub density: String,
    pub transforms: Vec<TransformRow>,
    pub jumps: Vec<JumpRow>,
    pub max_jump_error: f64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationCount {
    pub generation: i32,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhitneyReport {
    pub strip: Rect,
    pub max_generation: i32,
    pub counts: Vec<GenerationCount>,
    pub total_area: f64,
    pub cubes: Vec<WhitneyCube>,
}

impl WhitneyReport {
    pub fn new(strip: Rect, max_generation: i32, cubes: Vec<WhitneyCube>) -> Self {
        let mut counts: Vec<GenerationCount> = Vec::new();
        for c in &cubes {
            match counts.iter_mut().find(|g| g.generation == c.generation) {
                Some(g) => g.count += 1,
                None => counts.push(GenerationCount {
                    generation: c.generation,
                    count: 1,
                }),
            }
        }
        counts.sort_by_key(|g| g.generation);
        WhitneyReport {
            strip,
            max_generation,
            counts,
            total_area: cubes.iter().map(|c| c.area()).sum(),
            cubes,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Conditions(ConditionReport),
    Twb(TwbReport),
    Cauchy(CauchyReport),
    Whitney(WhitneyReport),
    Theorem1(Theorem1Report),
    Example5(Dossier),
}

impl Report {
    pub fn command(&self) -> &'static str {
        match self {
            Report::Conditions(_) => "conditions",
            Report::Twb(_) => "twb",
            Report::Cauchy(_) => "cauchy",
            Report::Whitney(_) => "whitney",
            Report::Theorem1(_) => "theorem1",
            Report::Example5(_) => "example5",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope<R> {
    schema_version: u32,
    command: String,
    status: Status,
    report: R,
}

/// A report together with its overall status; serialises to the versioned envelope
/// `{schema_version, command, status, report}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub status: Status,
    pub report: Report,
}

fn envelope_json<R: Serialize>(command: &str, status: Status, report: &R) -> Result<String> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        status,
        report,
    };
    Ok(serde_json::to_string_pretty(&env)? + "\n")
}

fn decode<R: for<'de> Deserialize<'de>>(v: serde_json::Value) -> Result<R> {
    serde_json::from_value(v).map_err(|e| Error::Config(format!("report does not match the schema: {e}")))
}

impl Document {
    pub fn new(status: Status, report: Report) -> Self {
        Document { status, report }
    }

    pub fn command(&self) -> &'static str {
        self.report.command()
    }

    pub fn to_json(&self) -> Result<String> {
        let (c, s) = (self.command(), self.status);
        match &self.report {
            Report::Conditions(r) => envelope_json(c, s, r),
            Report::Twb(r) => envelope_json(c, s, r),
            Report::Cauchy(r) => envelope_json(c, s, r),
            Report::Whitney(r) => envelope_json(c, s, r),
            Report::Theorem1(r) => envelope_json(c, s, r),
            Report::Example5(r) => envelope_json(c, s, r),
        }
    }

    /// Parses and validates an emitted report: the envelope must carry the current
    /// schema version and the body must decode as the report type of its command.
    pub fn from_json(text: &str) -> Result<Self> {
        let env: Envelope<serde_json::Value> =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("not a report envelope: {e}")))?;
        if env.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema version {} is not supported (expected {SCHEMA_VERSION})",
                env.schema_version
            )));
        }
        let report = match env.command.as_str() {
            "conditions" => Report::Conditions(decode(env.report)?),
            "twb" => Report::Twb(decode(env.report)?),
            "cauchy" => Report::Cauchy(decode(env.report)?),
            "whitney" => Report::Whitney(decode(env.report)?),
            "theorem1" => Report::Theorem1(decode(env.report)?),
            "example5" => Report::Example5(decode(env.report)?),
            other => return Err(Error::Config(format!("unknown report command {other:?}"))),
        };
        Ok(Document::new(env.status, report))
    }

    /// Named plot-ready tables for the report.
    pub fn csv_tables(&self) -> Result<Vec<(String, String)>> {
        match &self.report {
            Report::Conditions(r) => {
                let mut rows = vec![
                    verdict_row("condition1", None, &r.condition1),
                    verdict_row("condition2", None, &r.condition2),
                ];
                rows.extend(sweep_rows("twb", &r.twb_sup_over_t));
                rows.extend(sweep_rows("prop1", &r.prop1_sup_over_a));
                Ok(vec![("conditions".into(), verdict_table(&rows)?)])
            }
            Report::Twb(r) => {
                let mut rows = sweep_rows("twb", &r.twb);
                rows.extend(sweep_rows("prop1", &r.prop1));
                Ok(vec![("twb".into(), verdict_table(&rows)?)])
            }
            Report::Cauchy(r) => {
                let transforms = table(
                    &["z_re", "z_im", "value_re", "value_im", "abs_error_estimate"],
                    r.transforms.iter().map(|t| vec![t.z.re, t.z.im, t.value.re, t.value.im, t.abs_error_estimate]),
                )?;
                let jumps = table(
                    &["s", "jump_re", "jump_im", "density_re", "density_im", "error"],
                    r.jumps.iter().map(|j| vec![j.s, j.jump.re, j.jump.im, j.density.re, j.density.im, j.error]),
                )?;
                Ok(vec![("cauchy_transform".into(), transforms), ("cauchy_jump".into(), jumps)])
            }
            Report::Whitney(r) => {
                let mut buf = Vec::new();
                crate::geometry::write_cubes_csv(&r.cubes, &mut buf)?;
                Ok(vec![("whitney".into(), utf8(buf)?)])
            }
            Report::Theorem1(r) => {
                let t = table(
                    &["probe_re", "probe_im", "on_boundary", "h_direct_re", "h_direct_im", "h_formula_re", "h_formula_im", "gap", "tolerance"],
                    r.probes.iter().map(|p| {
                        vec![
                            p.probe.re,
                            p.probe.im,
                            if p.on_boundary { 1.0 } else { 0.0 },
                            p.h_direct.re,
                            p.h_direct.im,
                            p.h_formula.re,
                            p.h_formula.im,
                            p.gap,
                            p.tolerance,
                        ]
                    }),
                )?;
                Ok(vec![("theorem1".into(), t)])
            }
            Report::Example5(d) => Ok(vec![
                (
                    "sigma".into(),
                    table(&["s", "sigma", "normalized"], d.sigma_sweep.iter().map(|r| vec![r.s, r.sigma, r.normalized]))?,
                ),
                (
                    "omega".into(),
                    table(&["t", "omega", "normalized"], d.omega_sweep.iter().map(|r| vec![r.t, r.omega, r.normalized]))?,
                ),
                (
                    "tangent".into(),
                    table(&["points", "max_angle"], d.tangent_trace.iter().map(|r| vec![r.points as f64, r.max_angle]))?,
                ),
                (
                    "condition2_trace".into(),
                    table(
                        &["inner", "outer", "term", "partial_sum"],
                        d.condition2.dyadic_trace.iter().map(|t| vec![t.inner, t.outer, t.term.re, t.partial_sum.re]),
                    )?,
                ),
                (
                    "dini_trace".into(),
                    table(
                        &["inner", "outer", "term", "partial_sum"],
                        d.dini.dyadic_trace.iter().map(|t| vec![t.inner, t.outer, t.term.re, t.partial_sum.re]),
                    )?,
                ),
            ]),
        }
    }
}

struct VerdictRow {
    quantity: String,
    param: Option<f64>,
    verdict: &'static str,
    value: Option<Complex64>,
}

fn verdict_row(quantity: &str, param: Option<f64>, v: &IntegralVerdict) -> VerdictRow {
    let (verdict, value) = match &v.kind {
        VerdictKind::Convergent { value, .. } => ("convergent", Some(*value)),
        VerdictKind::Divergent { .. } => ("divergent", None),
        VerdictKind::Inconclusive { .. } => ("inconclusive", None),
    };
    VerdictRow {
        quantity: quantity.to_string(),
        param,
        verdict,
        value,
    }
}

fn sweep_rows(quantity: &str, s: &Sweep) -> Vec<VerdictRow> {
    s.entries.iter().map(|e| verdict_row(quantity, Some(e.param), &e.verdict)).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn verdict_table(rows: &[VerdictRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "param", "verdict", "value_re", "value_im"])?;
    for r in rows {
        w.write_record([
            r.quantity.clone(),
            opt(r.param),
            r.verdict.to_string(),
            opt(r.value.map(|v| v.re)),
            opt(r.value.map(|v| v.im)),
        ])?;
    }
    finish(w)
}

fn table<I: Iterator<Item = Vec<f64>>>(header: &[&str], rows: I) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|x| x.to_string()))?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
}

fn utf8(buf: Vec<u8>) -> Result<String> {
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}
