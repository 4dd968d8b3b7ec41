//! Complex dilatation fields and the smoothness conditions evaluated on them.
//!
//! A field lives on a chart `(x, y)`: for the line geometry the chart is the
//! plane itself, for the circle geometry `(x, y) = (θ, r - 1)`. Every condition
//! is computed in chart coordinates, so both geometries share one code path;
//! `y` is always the signed distance-like height off the boundary curve.

mod conditions;
mod majorant;
mod report;

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Rect;

pub use conditions::{
    condition1, condition1_with, condition2, condition2_strip, condition2_with, condition3_ratio, default_probes, prop1_integral,
    prop1_integral_with, prop1_sweep, sigma_profile, twb_integral, twb_integral_with, twb_sweep, Sweep, SweepEntry,
    CONDITION_TOL,
};
pub use majorant::{default_heights, majorant, majorant_with, MajorantOptions, MonotonicMajorant};
pub use report::{full_report, Admissibility, ConditionReport, ReportParams, DEFAULT_SWEEP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Line,
    Circle,
}

impl Geometry {
    pub fn to_plane(self, x: f64, y: f64) -> Complex64 {
        match self {
            Geometry::Line => Complex64::new(x, y),
            Geometry::Circle => Complex64::from_polar(1.0 + y, x),
        }
    }

    /// `to_plane(t + u, y) - to_plane(t, 0)` without cancellation for small `u`, `y`.
    pub fn offset(self, t: f64, u: f64, y: f64) -> Complex64 {
        match self {
            Geometry::Line => Complex64::new(u, y),
            Geometry::Circle => {
                let h = (0.5 * u).sin();
                let local = Complex64::new(y - 2.0 * (1.0 + y) * h * h, (1.0 + y) * u.sin());
                Complex64::from_polar(1.0, t) * local
            }
        }
    }

    pub fn to_chart(self, z: Complex64) -> (f64, f64) {
        match self {
            Geometry::Line => (z.re, z.im),
            Geometry::Circle => (z.arg(), z.norm() - 1.0),
        }
    }

    /// Area element of the chart at height `y`.
    pub fn area_weight(self, y: f64) -> f64 {
        match self {
            Geometry::Line => 1.0,
            Geometry::Circle => 1.0 + y,
        }
    }

    /// Distance of `z` from the boundary curve (ℝ or the unit circle).
    pub fn boundary_distance(self, z: Complex64) -> f64 {
        match self {
            Geometry::Line => z.im.abs(),
            Geometry::Circle => (z.norm() - 1.0).abs(),
        }
    }
}

type ChartFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// A Beltrami coefficient with compact support.
#[derive(Clone)]
pub struct DilatationField {
    name: String,
    chart_eval: ChartFn,
    support: Rect,
    sup_bound: f64,
    geometry: Geometry,
    hot_spots: Vec<f64>,
}

impl fmt::Debug for DilatationField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DilatationField")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("sup_bound", &self.sup_bound)
            .field("geometry", &self.geometry)
            .field("hot_spots", &self.hot_spots)
            .finish()
    }
}

impl DilatationField {
    /// Builds a field from an evaluator in chart coordinates. The evaluator is
    /// only consulted inside `support`; outside it the field is 0.
    pub fn from_chart_fn<F>(name: impl Into<String>, f: F, support: Rect, sup_bound: f64, geometry: Geometry) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        if !support.is_valid() {
            return Err(Error::invalid(format!("support box {support:?} is degenerate")));
        }
        if !(0.0..=1.0).contains(&sup_bound) {
            return Err(Error::invalid(format!("sup bound {sup_bound} outside [0, 1]")));
        }
        Ok(DilatationField {
            name: name.into(),
            chart_eval: Arc::new(f),
            support,
            sup_bound,
            geometry,
            hot_spots: Vec::new(),
        })
    }

    /// Marks chart abscissae near which the field varies on the scale of the height.
    pub fn with_hot_spots(mut self, xs: Vec<f64>) -> Self {
        self.hot_spots = xs;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> Rect {
        self.support
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn hot_spots(&self) -> &[f64] {
        &self.hot_spots
    }

    /// `‖μ‖∞ < 1`, the quasiconformality requirement.
    pub fn is_quasiconformal(&self) -> bool {
        self.sup_bound < 1.0
    }

    pub fn eval_chart(&self, x: f64, y: f64) -> Complex64 {
        let s = &self.support;
        if x < s.x0 || x > s.x1 || y < s.y0 || y > s.y1 {
            return Complex64::new(0.0, 0.0);
        }
        (self.chart_eval)(x, y)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let (x, y) = self.geometry.to_chart(z);
        self.eval_chart(x, y)
    }

    /// `k · μ`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        let inner = self.chart_eval.clone();
        let mut out = DilatationField::from_chart_fn(
            format!("{}*{}", k, self.name),
            move |x, y| inner(x, y) * k,
            self.support,
            (self.sup_bound * k.abs()).min(1.0),
            self.geometry,
        )?;
        out.hot_spots = self.hot_spots.clone();
        Ok(out)
    }

    /// `z ↦ μ(z + t)` on the line, or the rotation by angle `t` on the circle.
    pub fn shifted(&self, t: f64) -> Self {
        let inner = self.chart_eval.clone();
        DilatationField {
            name: format!("{}(+{})", self.name, t),
            chart_eval: Arc::new(move |x, y| inner(x + t, y)),
            support: self.support.translate(Complex64::new(-t, 0.0)),
            sup_bound: self.sup_bound,
            geometry: self.geometry,
            hot_spots: self.hot_spots.iter().map(|h| h - t).collect(),
        }
    }

    /// Largest `|y|` reached by the support.
    pub(crate) fn max_height(&self) -> f64 {
        self.support.y0.abs().max(self.support.y1.abs())
    }

    pub fn zero() -> Self {
        DilatationField::from_chart_fn(
            "zero",
            |_, _| Complex64::new(0.0, 0.0),
            Rect::new(-1.0, 1.0, -1.0, 1.0),
            0.0,
            Geometry::Line,
        )
        .expect("static field is valid")
    }

    pub fn constant(k: Complex64, support: Rect) -> Result<Self> {
        DilatationField::from_chart_fn("constant", move |_, _| k, support, k.norm(), Geometry::Line)
    }

    /// `μ(x + iy) = |y|^α` on `support`.
    pub fn power_law(alpha: f64, support: Rect) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::invalid(format!("power-law exponent must be >= 0, got {alpha}")));
        }
        let h = support.y0.abs().max(support.y1.abs());
        let sup = h.powf(alpha);
        DilatationField::from_chart_fn(
            format!("power_law({alpha})"),
            move |_, y| Complex64::new(y.abs().powf(alpha), 0.0),
            support,
            sup,
            Geometry::Line,
        )
    }

    /// `μ(x + iy) = (ln(1/|y|))^-β` on `support`, which must stay below height `1/e`.
    pub fn log_power(beta: f64, support: Rect) -> Result<Self> {
        let h = support.y0.abs().max(support.y1.abs());
        if !(beta > 0.0) || !(h < (-1.0f64).exp() + 1e-15) {
            return Err(Error::invalid("log_power needs beta > 0 and support height <= 1/e"));
        }
        DilatationField::from_chart_fn(
            format!("log_power({beta})"),
            move |_, y| {
                let a = y.abs();
                if a == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new((1.0 / a).ln().powf(-beta), 0.0)
                }
            },
            support,
            (1.0 / h).ln().powf(-beta),
            Geometry::Line,
        )
    }

    pub fn default_log_power_box() -> Rect {
        let h = (-2.0f64).exp();
        Rect::new(-1.0, 1.0, -h, h)
    }

    /// Grid-backed field read from CSV with header `re,im,mu_re,mu_im`.
    ///
    /// Values are interpolated bilinearly; the field vanishes outside the grid
    /// hull and outside `support` when one is given.
    pub fn csv_grid(path: &Path, support: Option<Rect>) -> Result<Self> {
        let grid = Grid::read(path)?;
        let hull = Rect::new(grid.xs[0], *grid.xs.last().unwrap(), grid.ys[0], *grid.ys.last().unwrap());
        let support = match support {
            Some(b) => b
                .intersect(&hull)
                .ok_or_else(|| Error::invalid("csv grid does not meet the requested box"))?,
            None => hull,
        };
        let sup = grid.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let grid = Arc::new(grid);
        DilatationField::from_chart_fn(
            format!("csv_grid({})", path.display()),
            move |x, y| grid.interpolate(x, y),
            support,
            sup,
            Geometry::Line,
        )
    }
}

#[derive(Debug)]
struct Grid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<Complex64>,
}

#[derive(Deserialize)]
struct GridRow {
    re: f64,
    im: f64,
    mu_re: f64,
    mu_im: f64,
}

impl Grid {
    fn read(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let headers = rdr.headers()?.clone();
        let expected = ["re", "im", "mu_re", "mu_im"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::invalid(format!("csv header must be re,im,mu_re,mu_im, got {:?}", headers)));
        }
        let rows: Vec<GridRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        let mut xs: Vec<f64> = rows.iter().map(|r| r.re).collect();
        let mut ys: Vec<f64> = rows.iter().map(|r| r.im).collect();
        for v in [&mut xs, &mut ys] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        if xs.len() < 2 || ys.len() < 2 || xs.len() * ys.len() != rows.len() {
            return Err(Error::invalid(format!(
                "csv grid must be a full rectangular grid with at least 2x2 nodes ({} rows, {}x{} distinct coordinates)",
                rows.len(),
                xs.len(),
                ys.len()
            )));
        }
        let mut values = vec![Complex64::new(f64::NAN, 0.0); rows.len()];
        for r in &rows {
            let i = xs.binary_search_by(|v| v.total_cmp(&r.re)).expect("coordinate present");
            let j = ys.binary_search_by(|v| v.total_cmp(&r.im)).expect("coordinate present");
            let mu = Complex64::new(r.mu_re, r.mu_im);
            if !(mu.re.is_finite() && mu.im.is_finite()) {
                return Err(Error::invalid(format!("non-finite grid value at ({}, {})", r.re, r.im)));
            }
            values[j * xs.len() + i] = mu;
        }
        if values.iter().any(|v| v.re.is_nan()) {
            return Err(Error::invalid("csv grid has duplicate nodes"));
        }
        Ok(Grid { xs, ys, values })
    }

    fn interpolate(&self, x: f64, y: f64) -> Complex64 {
        let nx = self.xs.len();
        if x < self.xs[0] || x > self.xs[nx - 1] || y < self.ys[0] || y > *self.ys.last().unwrap() {
            return Complex64::new(0.0, 0.0);
        }
        let cell = |v: &[f64], t: f64| {
            let i = v.partition_point(|&a| a <= t).clamp(1, v.len() - 1) - 1;
            let w = (t - v[i]) / (v[i + 1] - v[i]);
            (i, w)
        };
        let (i, wx) = cell(&self.xs, x);
        let (j, wy) = cell(&self.ys, y);
        let at = |i: usize, j: usize| self.values[j * nx + i];
        at(i, j) * ((1.0 - wx) * (1.0 - wy))
            + at(i + 1, j) * (wx * (1.0 - wy))
            + at(i, j + 1) * ((1.0 - wx) * wy)
            + at(i + 1, j + 1) * (wx * wy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn zero_outside_support() {
        let f = DilatationField::constant(Complex64::new(0.3, 0.0), Rect::new(0.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(f.eval(Complex64::new(0.5, 0.5)), Complex64::new(0.3, 0.0));
        assert_eq!(f.eval(Complex64::new(1.5, 0.5)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn offset_matches_difference() {
        for g in [Geometry::Line, Geometry::Circle] {
            for (t, u, y) in [(0.4, 0.3, -0.2), (-2.0, -0.7, 0.1), (1.0, 1e-3, 2e-3)] {
                let d = g.to_plane(t + u, y) - g.to_plane(t, 0.0);
                assert!((g.offset(t, u, y) - d).norm() < 1e-14, "{g:?} {t} {u} {y}");
            }
        }
        let tiny = Geometry::Circle.offset(0.4, 1e-18, 0.0);
        assert!((tiny.norm() - 1e-18).abs() < 1e-30);
    }

    #[test]
    fn circle_chart_round_trip() {
        let z = Geometry::Circle.to_plane(0.7, 0.05);
        let (x, y) = Geometry::Circle.to_chart(z);
        assert!((x - 0.7).abs() < 1e-15 && (y - 0.05).abs() < 1e-15);
    }

    #[test]
    fn shift_moves_support() {
        let f = DilatationField::power_law(1.0, Rect::new(-1.0, 1.0, -1.0, 1.0)).unwrap();
        let g = f.shifted(0.3);
        let z = Complex64::new(0.2, 0.4);
        assert_eq!(g.eval(z), f.eval(z + 0.3));
    }

    #[test]
    fn csv_grid_interpolates_bilinearly() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "re,im,mu_re,mu_im").unwrap();
        for (y, row) in [(0.0, [0.0, 0.2]), (1.0, [0.4, 0.6])] {
            for (x, v) in [0.0, 1.0].iter().zip(row) {
                writeln!(file, "{x},{y},{v},0").unwrap();
            }
        }
        let f = DilatationField::csv_grid(file.path(), None).unwrap();
        assert!((f.eval(Complex64::new(0.5, 0.5)).re - 0.3).abs() < 1e-15);
        assert_eq!(f.eval(Complex64::new(2.0, 0.5)), Complex64::new(0.0, 0.0));
        assert!((f.sup_bound() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn csv_grid_rejects_bad_header() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "x,y,a,b\n0,0,0,0").unwrap();
        assert!(DilatationField::csv_grid(file.path(), None).is_err());
    }
}
