//! Textual specs for fields, curves, densities and maps.
//!
//! ```text
//! field    zero | constant:K[@BOX] | power_law:A[@BOX] | log_power:B[@BOX] | section5 | csv_grid:PATH[@BOX]
//! curve    line | circle | polyline:X,Y;X,Y;...
//! density  one | indicator:A,B | omega:K | re_omega | bump:H
//! map      identity | bump:EPS | affine:A_RE,A_IM,B_RE,B_IM | section5
//! BOX      X0,X1,Y0,Y1
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cauchy::Density;
use crate::dilatation::DilatationField;
use crate::error::{Error, Result};
use crate::example5;
use crate::geometry::ParametrizedCurve;
use crate::quadrature::Rect;
use crate::semmes::{smooth_bump_density, ExplicitQCMap};

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn parse_floats(s: &str, sep: char) -> Result<Vec<f64>> {
    s.split(sep)
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| config(format!("not a number: {t:?}")))
        })
        .collect()
}

fn parse_fixed<const N: usize>(s: &str, what: &str) -> Result<[f64; N]> {
    let v = parse_floats(s, ',')?;
    v.try_into()
        .map_err(|v: Vec<f64>| config(format!("{what} needs {N} comma-separated numbers, got {}", v.len())))
}

fn parse_box(s: &str) -> Result<Rect> {
    let [x0, x1, y0, y1] = parse_fixed::<4>(s, "box")?;
    let r = Rect::new(x0, x1, y0, y1);
    if !r.is_valid() {
        return Err(config(format!("degenerate box {s:?}")));
    }
    Ok(r)
}

fn fmt_box(r: &Rect) -> String {
    format!("{},{},{},{}", r.x0, r.x1, r.y0, r.y1)
}

/// `X,Y` pairs separated by `;`.
pub(crate) fn parse_points(s: &str) -> Result<Vec<Complex64>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_fixed::<2>(t, "point").map(|[x, y]| Complex64::new(x, y)))
        .collect()
}

fn split_head(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((h, rest)) => (h.trim(), Some(rest.trim())),
        None => (s.trim(), None),
    }
}

fn split_box(rest: &str) -> Result<(&str, Option<Rect>)> {
    match rest.rsplit_once('@') {
        Some((v, b)) => Ok((v, Some(parse_box(b)?))),
        None => Ok((rest, None)),
    }
}

fn unit_box() -> Rect {
    Rect::new(-1.0, 1.0, -1.0, 1.0)
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Zero,
    Constant { k: f64, support: Rect },
    PowerLaw { alpha: f64, support: Rect },
    LogPower { beta: f64, support: Rect },
    Section5,
    CsvGrid { path: PathBuf, support: Option<Rect> },
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_field(s)
    }
}

fn parse_field<'a>(s: &'a str) -> Result<FieldSpec> {
    let (head, rest) = split_head(s);
    let need = |r: Option<&'a str>| r.ok_or_else(|| config(format!("field {head:?} needs a parameter")));
    match head {
        "zero" => Ok(FieldSpec::Zero),
        "section5" => Ok(FieldSpec::Section5),
        "constant" | "power_law" | "log_power" => {
            let (v, b) = split_box(need(rest)?)?;
            let [x] = parse_fixed::<1>(v, head)?;
            let support = b.unwrap_or_else(|| match head {
                "log_power" => DilatationField::default_log_power_box(),
                _ => unit_box(),
            });
            Ok(match head {
                "constant" => FieldSpec::Constant { k: x, support },
                "power_law" => FieldSpec::PowerLaw { alpha: x, support },
                _ => FieldSpec::LogPower { beta: x, support },
            })
        }
        "csv_grid" => {
            let (p, b) = split_box(need(rest)?)?;
            if p.is_empty() {
                return Err(config("csv_grid needs a path"));
            }
            Ok(FieldSpec::CsvGrid {
                path: PathBuf::from(p),
                support: b,
            })
        }
        other => Err(config(format!("unknown field family {other:?}"))),
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Zero => write!(f, "zero"),
            FieldSpec::Section5 => write!(f, "section5"),
            FieldSpec::Constant { k, support } => write!(f, "constant:{k}@{}", fmt_box(support)),
            FieldSpec::PowerLaw { alpha, support } => write!(f, "power_law:{alpha}@{}", fmt_box(support)),
            FieldSpec::LogPower { beta, support } => write!(f, "log_power:{beta}@{}", fmt_box(support)),
            FieldSpec::CsvGrid { path, support } => {
                write!(f, "csv_grid:{}", path.display())?;
                match support {
                    Some(b) => write!(f, "@{}", fmt_box(b)),
                    None => Ok(()),
                }
            }
        }
    }
}

string_serde!(FieldSpec);

impl FieldSpec {
    pub fn build(&self) -> Result<DilatationField> {
        match self {
            FieldSpec::Zero => Ok(DilatationField::zero()),
            FieldSpec::Constant { k, support } => DilatationField::constant(Complex64::new(*k, 0.0), *support),
            FieldSpec::PowerLaw { alpha, support } => DilatationField::power_law(*alpha, *support),
            FieldSpec::LogPower { beta, support } => DilatationField::log_power(*beta, *support),
            FieldSpec::Section5 => example5::build()?.field(),
            FieldSpec::CsvGrid { path, support } => DilatationField::csv_grid(path, *support),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    Line,
    Circle,
    Polyline(Vec<Complex64>),
}

impl FromStr for CurveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match split_head(s) {
            ("line", None) => Ok(CurveSpec::Line),
            ("circle", None) => Ok(CurveSpec::Circle),
            ("polyline", Some(rest)) => Ok(CurveSpec::Polyline(parse_points(rest)?)),
            _ => Err(config(format!("unknown curve {s:?}"))),
        }
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSpec::Line => write!(f, "line"),
            CurveSpec::Circle => write!(f, "circle"),
            CurveSpec::Polyline(v) => {
                let pts: Vec<String> = v.iter().map(|z| format!("{},{}", z.re, z.im)).collect();
                write!(f, "polyline:{}", pts.join(";"))
            }
        }
    }
}

string_serde!(CurveSpec);

impl CurveSpec {
    pub fn build(&self) -> Result<ParametrizedCurve> {
        match self {
            CurveSpec::Line => Ok(ParametrizedCurve::real_line()),
            CurveSpec::Circle => Ok(ParametrizedCurve::unit_circle()),
            CurveSpec::Polyline(v) => ParametrizedCurve::polyline(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    One,
    Indicator(f64, f64),
    Omega(i32),
    ReOmega,
    Bump(f64),
}

impl FromStr for DensitySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match split_head(s) {
            ("one", None) => Ok(DensitySpec::One),
            ("re_omega", None) => Ok(DensitySpec::ReOmega),
            ("indicator", Some(r)) => {
                let [a, b] = parse_fixed::<2>(r, "indicator")?;
                if !(a < b) {
                    return Err(config(format!("indicator needs a < b, got {r:?}")));
                }
                Ok(DensitySpec::Indicator(a, b))
            }
            ("omega", Some(r)) => r
                .parse::<i32>()
                .map(DensitySpec::Omega)
                .map_err(|_| config(format!("omega needs an integer power, got {r:?}"))),
            ("bump", Some(r)) => {
                let [h] = parse_fixed::<1>(r, "bump")?;
                if !(h > 0.0 && h.is_finite()) {
                    return Err(config(format!("bump width must be positive, got {h}")));
                }
                Ok(DensitySpec::Bump(h))
            }
            _ => Err(config(format!("unknown density {s:?}"))),
        }
    }
}

impl fmt::Display for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensitySpec::One => write!(f, "one"),
            DensitySpec::ReOmega => write!(f, "re_omega"),
            DensitySpec::Indicator(a, b) => write!(f, "indicator:{a},{b}"),
            DensitySpec::Omega(k) => write!(f, "omega:{k}"),
            DensitySpec::Bump(h) => write!(f, "bump:{h}"),
        }
    }
}

string_serde!(DensitySpec);

impl DensitySpec {
    /// `omega` and `re_omega` are functions of the circle point `e^{iθ}`; on other
    /// curves they are rejected.
    pub fn build(&self, curve: &ParametrizedCurve) -> Result<Density> {
        let circle = matches!(curve.domain(), crate::geometry::CurveDomain::UnitCircle);
        let need_circle = || {
            if circle {
                Ok(())
            } else {
                Err(config(format!("density {self} is defined on the unit circle only")))
            }
        };
        Ok(match *self {
            DensitySpec::One if circle => Density::on_circle(|_| Complex64::new(1.0, 0.0)),
            DensitySpec::One => Density::new(|_| Complex64::new(1.0, 0.0), curve.window()),
            DensitySpec::Indicator(a, b) => Density::indicator(a, b),
            DensitySpec::Omega(k) => {
                need_circle()?;
                Density::on_circle(move |w| w.powi(k))
            }
            DensitySpec::ReOmega => {
                need_circle()?;
                Density::on_circle(|w| Complex64::new(w.re, 0.0))
            }
            DensitySpec::Bump(h) => smooth_bump_density(h),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Identity,
    Bump(f64),
    Affine { a: Complex64, b: Complex64 },
    Section5,
}

impl FromStr for MapSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match split_head(s) {
            ("identity", None) => Ok(MapSpec::Identity),
            ("section5", None) => Ok(MapSpec::Section5),
            ("bump", Some(r)) => {
                let [eps] = parse_fixed::<1>(r, "bump")?;
                Ok(MapSpec::Bump(eps))
            }
            ("affine", Some(r)) => {
                let [ar, ai, br, bi] = parse_fixed::<4>(r, "affine")?;
                Ok(MapSpec::Affine {
                    a: Complex64::new(ar, ai),
                    b: Complex64::new(br, bi),
                })
            }
            _ => Err(config(format!("unknown map {s:?}"))),
        }
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Identity => write!(f, "identity"),
            MapSpec::Section5 => write!(f, "section5"),
            MapSpec::Bump(eps) => write!(f, "bump:{eps}"),
            MapSpec::Affine { a, b } => write!(f, "affine:{},{},{},{}", a.re, a.im, b.re, b.im),
        }
    }
}

string_serde!(MapSpec);

impl MapSpec {
    pub fn build(&self) -> Result<ExplicitQCMap> {
        match *self {
            MapSpec::Identity => Ok(ExplicitQCMap::identity()),
            MapSpec::Bump(eps) => ExplicitQCMap::bump(eps),
            MapSpec::Affine { a, b } => ExplicitQCMap::affine(a, b, Complex64::new(0.0, 0.0)),
            MapSpec::Section5 => Ok(example5::build()?.extension()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_specs_round_trip_through_text() {
        for s in ["zero", "section5", "constant:0.3@-1,1,-1,1", "power_law:0.75@-1,1,-1,1", "csv_grid:a.csv@0,1,0,1"] {
            let f: FieldSpec = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        let f: FieldSpec = "power_law:0.75".parse().unwrap();
        assert_eq!(f, FieldSpec::PowerLaw { alpha: 0.75, support: unit_box() });
        assert!("power_law".parse::<FieldSpec>().is_err());
        assert!("power_law:x".parse::<FieldSpec>().is_err());
        assert!("cubic:1".parse::<FieldSpec>().is_err());
        assert!("constant:0.1@0,0,0,1".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn other_specs_parse() {
        assert_eq!("polyline:0,0;1,0;1,1".parse::<CurveSpec>().unwrap().to_string(), "polyline:0,0;1,0;1,1");
        assert_eq!("omega:2".parse::<DensitySpec>().unwrap(), DensitySpec::Omega(2));
        assert!("indicator:1,0".parse::<DensitySpec>().is_err());
        assert_eq!("affine:1,0,0.2,0".parse::<MapSpec>().unwrap().to_string(), "affine:1,0,0.2,0");
        let line = ParametrizedCurve::real_line();
        assert!(DensitySpec::ReOmega.build(&line).is_err());
    }
}
