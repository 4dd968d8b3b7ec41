//! Batch front end: specs in, versioned JSON and plot-ready CSV out.

mod report;
mod specs;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cauchy::{cauchy_transform_result, jump, plemelj_pair, TRANSFORM_TOL};
use crate::dilatation::{full_report, prop1_sweep, twb_sweep, DilatationField, ReportParams, CONDITION_TOL, DEFAULT_SWEEP};
use crate::error::{Error, Result};
use crate::example5;
use crate::geometry::{whitney_decompose, CurveDomain};
use crate::quadrature::{DyadicOptions, QuadOptions, Rect};
use crate::semmes::{theorem1_report, Verdict};

pub use report::{CauchyReport, Document, JumpRow, Report, Status, TransformRow, TwbReport, WhitneyReport, SCHEMA_VERSION};
pub use specs::{CurveSpec, DensitySpec, FieldSpec, MapSpec};

const JUMP_TOL: f64 = 1e-6;
const BOUNDARY_SAMPLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Directory for report files; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsArgs {
    #[arg(long)]
    pub field: FieldSpec,
    #[arg(long)]
    #[serde(default)]
    pub tol: Option<f64>,
    /// Condition-3 probes as `X,Y;X,Y;...`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub probes: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub t_sweep: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub a_sweep: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(default)]
    pub condition1_outer: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub condition2_outer: Option<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwbArgs {
    #[arg(long)]
    pub field: FieldSpec,
    #[arg(long)]
    #[serde(default)]
    pub tol: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub t_sweep: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub a_sweep: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyArgs {
    #[arg(long)]
    #[serde(default)]
    pub curve: Option<CurveSpec>,
    #[arg(long)]
    #[serde(default)]
    pub density: Option<DensitySpec>,
    #[arg(long)]
    #[serde(default)]
    pub tol: Option<f64>,
    /// Off-curve evaluation points as `X,Y;X,Y;...`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub probes: Option<String>,
    /// Curve parameters at which the jump is recovered.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub params: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhitneyArgs {
    /// `X0,X1,Y0,Y1`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub strip: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub max_generation: Option<i32>,
    #[command(flatten)]
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Args {
    #[arg(long)]
    #[serde(default)]
    pub map: Option<MapSpec>,
    #[arg(long)]
    #[serde(default)]
    pub density: Option<DensitySpec>,
    /// Plane probes as `X,Y;X,Y;...`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub probes: Option<String>,
    /// Boundary parameters probed on the curve itself.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub line_probes: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example5Args {
    /// Also write the boundary, σ, ω and tangent CSV grids.
    #[arg(long)]
    #[serde(default)]
    pub all: bool,
    #[arg(long)]
    #[serde(default)]
    pub boundary_samples: Option<usize>,
    #[command(flatten)]
    #[serde(default)]
    pub output: Output,
}

/// One run. In a `--config` file this is a JSON object whose `command` key names
/// the subcommand and whose other keys are its long flags in snake case, with
/// `out` and `format` nested under `output`.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    /// Conditions 1-3, the TWB sweep and the uniform bound for a field.
    Conditions(ConditionsArgs),
    /// TWB and uniform-bound sweeps only.
    Twb(TwbArgs),
    /// Cauchy transform at probes and jump recovery on the curve.
    Cauchy(CauchyArgs),
    /// Whitney cube dump for a strip.
    Whitney(WhitneyArgs),
    /// Direct and area-formula evaluation of H for an explicit map.
    Theorem1(Theorem1Args),
    /// The smooth non-Dini quasicircle dossier.
    Example5(Example5Args),
}

#[derive(Debug, Parser)]
#[command(name = "quasicircle", version, about = "Dilatation conditions, Cauchy transforms and quasicircle checks")]
pub struct Cli {
    /// JSON run configuration; replaces the subcommand.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<RunConfig>,
}

fn positive(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::Config(format!("{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

fn finite_list(name: &str, v: &Option<Vec<f64>>) -> Result<()> {
    match v {
        Some(xs) if xs.iter().any(|x| !x.is_finite()) => Err(Error::Config(format!("{name} has a non-finite entry"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Conditions(_) => "conditions",
            RunConfig::Twb(_) => "twb",
            RunConfig::Cauchy(_) => "cauchy",
            RunConfig::Whitney(_) => "whitney",
            RunConfig::Theorem1(_) => "theorem1",
            RunConfig::Example5(_) => "example5",
        }
    }

    pub fn output(&self) -> &Output {
        match self {
            RunConfig::Conditions(a) => &a.output,
            RunConfig::Twb(a) => &a.output,
            RunConfig::Cauchy(a) => &a.output,
            RunConfig::Whitney(a) => &a.output,
            RunConfig::Theorem1(a) => &a.output,
            RunConfig::Example5(a) => &a.output,
        }
    }

    /// Checks every numeric input and parses the embedded point lists.
    pub fn validate(&self) -> Result<()> {
        match self {
            RunConfig::Conditions(a) => {
                positive("tol", a.tol)?;
                positive("condition1_outer", a.condition1_outer)?;
                positive("condition2_outer", a.condition2_outer)?;
                finite_list("t_sweep", &a.t_sweep)?;
                finite_list("a_sweep", &a.a_sweep)?;
                if let Some(p) = &a.probes {
                    specs::parse_points(p)?;
                }
            }
            RunConfig::Twb(a) => {
                positive("tol", a.tol)?;
                finite_list("t_sweep", &a.t_sweep)?;
                finite_list("a_sweep", &a.a_sweep)?;
            }
            RunConfig::Cauchy(a) => {
                positive("tol", a.tol)?;
                finite_list("params", &a.params)?;
                if let Some(p) = &a.probes {
                    specs::parse_points(p)?;
                }
            }
            RunConfig::Whitney(a) => {
                if let Some(s) = &a.strip {
                    strip_rect(s)?;
                }
                if let Some(g) = a.max_generation {
                    if !(0..=crate::geometry::MAX_GENERATION).contains(&g) {
                        return Err(Error::Config(format!("max_generation must lie in 0..=40, got {g}")));
                    }
                }
            }
            RunConfig::Theorem1(a) => {
                finite_list("line_probes", &a.line_probes)?;
                if let Some(p) = &a.probes {
                    specs::parse_points(p)?;
                }
            }
            RunConfig::Example5(a) => {
                if a.boundary_samples == Some(0) {
                    return Err(Error::Config("boundary_samples must be positive".into()));
                }
            }
        }
        if let Some(dir) = &self.output().out {
            if dir.exists() && !dir.is_dir() {
                return Err(Error::Config(format!("{} is not a directory", dir.display())));
            }
        }
        Ok(())
    }
}

fn strip_rect(s: &str) -> Result<Rect> {
    let v = specs::parse_floats(s, ',')?;
    match v[..] {
        [x0, x1, y0, y1] if Rect::new(x0, x1, y0, y1).is_valid() => Ok(Rect::new(x0, x1, y0, y1)),
        _ => Err(Error::Config(format!("strip must be four numbers X0,X1,Y0,Y1 with X0<X1, Y0<Y1, got {s:?}"))),
    }
}

fn sweep_or_default(v: &Option<Vec<f64>>) -> Vec<f64> {
    v.clone().unwrap_or_else(|| DEFAULT_SWEEP.to_vec())
}

fn run_conditions(a: &ConditionsArgs) -> Result<Document> {
    let mu = a.field.build()?;
    let params = ReportParams {
        tol: a.tol.unwrap_or(CONDITION_TOL),
        condition1_outer: a.condition1_outer,
        condition2_outer: a.condition2_outer,
        probes: a.probes.as_deref().map(specs::parse_points).transpose()?,
        t_sweep: sweep_or_default(&a.t_sweep),
        a_sweep: sweep_or_default(&a.a_sweep),
        ..Default::default()
    };
    let r = full_report(&mu, &params);
    let condition2_fails = r.condition2.is_divergent()
        || (r.condition2.is_convergent() && r.condition3_ratio.is_some_and(|x| !(x <= params.condition3_threshold)));
    let status = if r.admissibility.is_admissible() {
        Status::Consistent
    } else if r.condition1.is_divergent() && condition2_fails {
        Status::Inconsistent
    } else {
        Status::Inconclusive
    };
    Ok(Document::new(status, Report::Conditions(r)))
}

fn run_twb(a: &TwbArgs) -> Result<Document> {
    let mu: DilatationField = a.field.build()?;
    let opts = DyadicOptions::with_tol(a.tol.unwrap_or(CONDITION_TOL));
    let twb = twb_sweep(&mu, &sweep_or_default(&a.t_sweep), &opts)?;
    let prop1 = prop1_sweep(&mu, &sweep_or_default(&a.a_sweep), &opts)?;
    let verdicts = twb.entries.iter().chain(&prop1.entries).map(|e| &e.verdict);
    let status = if verdicts.clone().any(|v| v.is_inconclusive()) {
        Status::Inconclusive
    } else if verdicts.clone().any(|v| v.is_divergent()) {
        Status::Inconsistent
    } else {
        Status::Consistent
    };
    Ok(Document::new(
        status,
        Report::Twb(TwbReport {
            field: mu.name().to_string(),
            twb,
            prop1,
        }),
    ))
}

fn default_cauchy_params(domain: CurveDomain) -> Vec<f64> {
    match domain {
        CurveDomain::UnitCircle => (0..8).map(|k| -std::f64::consts::PI + (k as f64 + 0.5) * std::f64::consts::PI / 4.0).collect(),
        _ => vec![-0.5, 0.0, 0.5],
    }
}

fn run_cauchy(a: &CauchyArgs) -> Result<Document> {
    let curve_spec = a.curve.clone().unwrap_or(CurveSpec::Circle);
    let density_spec = a.density.clone().unwrap_or(DensitySpec::One);
    let curve = curve_spec.build()?;
    let f = density_spec.build(&curve)?;
    let opts = QuadOptions {
        tol: a.tol.unwrap_or(TRANSFORM_TOL),
        rel_tol: 0.0,
        ..Default::default()
    };
    let probes = match &a.probes {
        Some(p) => specs::parse_points(p)?,
        None => specs::parse_points("0.3,0.2;-0.5,0.1;0,0.7;1.5,0;0,-2;-1.2,1.1")?,
    };
    let params = a.params.clone().unwrap_or_else(|| default_cauchy_params(curve.domain()));
    let mut failures = Vec::new();
    let mut transforms = Vec::new();
    for z in probes {
        match cauchy_transform_result(&curve, &f, z, &opts) {
            Ok(r) => transforms.push(TransformRow {
                z,
                value: r.value,
                abs_error_estimate: r.abs_error_estimate,
            }),
            Err(e) => failures.push(format!("transform at {z}: {e}")),
        }
    }
    let mut jumps = Vec::new();
    for s in params {
        match plemelj_pair(&curve, &f, s).and_then(|(plus, minus)| Ok((plus, minus, jump(&curve, &f, s)?))) {
            Ok((plus, minus, j)) => {
                let density = f.eval(s);
                jumps.push(JumpRow {
                    s,
                    plus,
                    minus,
                    jump: j,
                    density,
                    error: (j - density).norm(),
                });
            }
            Err(e) => failures.push(format!("jump at {s}: {e}")),
        }
    }
    let max_jump_error = jumps.iter().map(|r| r.error).fold(0.0, f64::max);
    let status = if !failures.is_empty() {
        Status::Inconclusive
    } else if max_jump_error < JUMP_TOL {
        Status::Consistent
    } else {
        Status::Inconsistent
    };
    Ok(Document::new(
        status,
        Report::Cauchy(CauchyReport {
            curve: curve_spec.to_string(),
            density: density_spec.to_string(),
            transforms,
            jumps,
            max_jump_error,
            failures,
        }),
    ))
}

fn run_whitney(a: &WhitneyArgs) -> Result<Document> {
    let strip = match &a.strip {
        Some(s) => strip_rect(s)?,
        None => Rect::new(-1.0, 1.0, -1.0, 1.0),
    };
    let max_generation = a.max_generation.unwrap_or(8);
    let cubes = whitney_decompose(strip, max_generation)?;
    Ok(Document::new(Status::Consistent, Report::Whitney(WhitneyReport::new(strip, max_generation, cubes))))
}

fn default_plane_probes(domain: CurveDomain) -> Vec<Complex64> {
    match domain {
        CurveDomain::UnitCircle => [1.02, 1.05, 1.08]
            .iter()
            .flat_map(|&r| [-2.0, -0.5, 0.3, 1.5].map(|t| Complex64::from_polar(r, t)))
            .collect(),
        _ => [-1.4, -0.6, 0.1, 0.7, 1.3]
            .iter()
            .flat_map(|&x| [0.8, 0.3, -0.3, -0.8].map(|y| Complex64::new(x, y)))
            .collect(),
    }
}

fn run_theorem1(a: &Theorem1Args) -> Result<Document> {
    let rho = a.map.clone().unwrap_or(MapSpec::Bump(0.05)).build()?;
    let g = a.density.clone().unwrap_or(DensitySpec::Bump(1.5)).build(&rho.base_curve())?;
    let plane = match &a.probes {
        Some(p) => specs::parse_points(p)?,
        None => default_plane_probes(rho.boundary()),
    };
    let line = a.line_probes.clone().unwrap_or_else(|| vec![-0.5, 0.0, 0.8]);
    let r = theorem1_report(&rho, &g, &line, &plane);
    let status = match r.verdict {
        Verdict::Consistent => Status::Consistent,
        Verdict::Inconsistent => Status::Inconsistent,
        Verdict::Inconclusive => Status::Inconclusive,
    };
    Ok(Document::new(status, Report::Theorem1(r)))
}

fn run_example5() -> Result<Document> {
    let map = example5::build()?;
    let d = example5::dossier(&map)?;
    let status = if !d.failures.is_empty() || d.condition2.is_inconclusive() || d.dini.is_inconclusive() {
        Status::Inconclusive
    } else if d.condition2.is_convergent() && d.dini.is_divergent() && d.becker_sup <= 1.0 + 1e-9 && d.limsup.tail_max < 1.0 {
        Status::Consistent
    } else {
        Status::Inconsistent
    };
    Ok(Document::new(status, Report::Example5(d)))
}

/// Computes the report for a validated configuration without writing anything.
pub fn execute(config: &RunConfig) -> Result<Document> {
    config.validate()?;
    match config {
        RunConfig::Conditions(a) => run_conditions(a),
        RunConfig::Twb(a) => run_twb(a),
        RunConfig::Cauchy(a) => run_cauchy(a),
        RunConfig::Whitney(a) => run_whitney(a),
        RunConfig::Theorem1(a) => run_theorem1(a),
        RunConfig::Example5(_) => run_example5(),
    }
}

fn boundary_csv(samples: usize) -> Result<String> {
    let map = example5::build()?;
    let mut buf = Vec::new();
    example5::write_boundary_csv(&map, samples, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Runs one configuration, writes its outputs and returns the document with the
/// list of files written.
pub fn run(config: &RunConfig) -> Result<(Document, Vec<PathBuf>)> {
    let doc = execute(config)?;
    let out = config.output();
    let format = out.format.unwrap_or_default();
    let name = config.name();
    let mut tables = match format {
        Format::Csv => doc.csv_tables()?,
        Format::Json => Vec::new(),
    };
    let mut json = matches!(format, Format::Json);
    if let RunConfig::Example5(a) = config {
        if a.all {
            json = true;
            if format == Format::Json {
                tables = doc.csv_tables()?;
            }
            tables.push(("boundary".into(), boundary_csv(a.boundary_samples.unwrap_or(BOUNDARY_SAMPLES))?));
        }
    }
    let mut written = Vec::new();
    match &out.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            if json {
                let p = dir.join(format!("{name}.json"));
                fs::write(&p, doc.to_json()?)?;
                written.push(p);
            }
            for (t, body) in &tables {
                let p = dir.join(format!("{t}.csv"));
                fs::write(&p, body)?;
                written.push(p);
            }
        }
        None => {
            if json {
                println!("{}", doc.to_json()?);
            } else {
                for (t, body) in &tables {
                    println!("# {t}");
                    print!("{body}");
                }
            }
        }
    }
    Ok((doc, written))
}

/// Entry point for the binary: parses `args`, runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let config = match (cli.config, cli.command) {
        (Some(path), None) => match RunConfig::load(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        },
        (None, Some(c)) => c,
        _ => {
            eprintln!("error: give a subcommand or --config");
            return 1;
        }
    };
    match run(&config) {
        Ok((doc, _)) => {
            eprintln!("{}: {}", config.name(), doc.status.label());
            doc.status.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
