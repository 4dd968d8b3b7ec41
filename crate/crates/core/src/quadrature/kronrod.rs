//! Adaptive 15-point Gauss–Kronrod integration with error-ordered bisection.
//!
//! The engine works on batches: every panel asks for its 15 nodes at once, which
//! lets the 2D integrator farm inner integrals out to rayon while keeping the
//! subdivision tree and the summation order fixed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::{QuadOptions, QuadratureResult};
use crate::error::{Error, Result};

// Abscissae of the 15-point Kronrod rule; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One integrand sample as seen by the engine.
///
/// `err` and `evals` carry the cost and accuracy of a nested computation (an
/// inner integral in 2D); for plain 1D integrands they are 0 and 1.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample {
    pub value: Complex64,
    pub err: f64,
    pub evals: usize,
}

impl Sample {
    pub fn plain(value: Complex64) -> Self {
        Sample { value, err: 0.0, evals: 1 }
    }
}

/// Node positions of the rule mapped to `[a, b]`, in a fixed order.
pub(crate) fn nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [0.0; 15];
    out[0] = c;
    for j in 0..7 {
        out[1 + 2 * j] = c - h * XGK[j];
        out[2 + 2 * j] = c + h * XGK[j];
    }
    out
}

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    roundoff_limited: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Max-heap on error; ties go to the leftmost panel so the tree is reproducible.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> (f64, bool) {
    let mut e = err;
    if resasc != 0.0 && e != 0.0 {
        e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor >= e {
        return (floor, true);
    }
    (e, false)
}

fn evaluate_panel<E>(eval: &E, a: f64, b: f64, evals: &mut usize) -> Result<Panel>
where
    E: Fn(&[f64]) -> Result<Vec<Sample>>,
{
    let xs = nodes(a, b);
    let samples = eval(&xs)?;
    debug_assert_eq!(samples.len(), 15);
    for (x, s) in xs.iter().zip(samples.iter()) {
        if !s.value.re.is_finite() || !s.value.im.is_finite() {
            return Err(Error::non_finite(x));
        }
        *evals += s.evals;
    }
    let h = 0.5 * (b - a);
    let fc = samples[0].value;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut inner_err = samples[0].err * WGK[7];
    for j in 0..7 {
        let f1 = samples[1 + 2 * j];
        let f2 = samples[2 + 2 * j];
        resk += (f1.value + f2.value) * WGK[j];
        resabs += (f1.value.norm() + f2.value.norm()) * WGK[j];
        inner_err += (f1.err + f2.err) * WGK[j];
        if j % 2 == 1 {
            resg += (f1.value + f2.value) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[7];
    for j in 0..7 {
        let f1 = samples[1 + 2 * j].value;
        let f2 = samples[2 + 2 * j].value;
        resasc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK[j];
    }
    let raw = ((resk - resg) * h).norm();
    let (err, roundoff_limited) = rescale_error(raw, resabs * h.abs(), resasc * h.abs());
    Ok(Panel {
        a,
        b,
        value: resk * h,
        error: err + inner_err * h.abs(),
        roundoff_limited,
    })
}

fn too_small(a: f64, b: f64) -> bool {
    let m = 0.5 * (a + b);
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    m <= a || m >= b || (b - a) <= 64.0 * f64::EPSILON * scale
}

fn assemble(panels: &mut [Panel], evaluations: usize, converged: bool) -> QuadratureResult {
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in panels.iter() {
        value += p.value;
        err += p.error;
    }
    QuadratureResult {
        value,
        abs_error_estimate: err,
        evaluations,
        converged,
    }
}

/// Runs the adaptive scheme over the consecutive intervals defined by `breaks`.
pub(crate) fn adaptive<E>(eval: E, breaks: &[f64], opts: &QuadOptions) -> Result<QuadratureResult>
where
    E: Fn(&[f64]) -> Result<Vec<Sample>>,
{
    if breaks.len() < 2 {
        return Err(Error::invalid("integration needs at least one interval"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let mut evaluations = 0usize;
    let mut heap = BinaryHeap::new();
    let mut finished: Vec<Panel> = Vec::new();
    for w in breaks.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::invalid(format!("interval [{}, {}] is empty or reversed", w[0], w[1])));
        }
        heap.push(evaluate_panel(&eval, w[0], w[1], &mut evaluations)?);
    }

    let target = |value: Complex64| opts.tol.max(opts.rel_tol * value.norm());
    loop {
        let (value, err) = heap
            .iter()
            .chain(finished.iter())
            .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| (v + p.value, e + p.error));
        if err <= target(value) {
            let mut all: Vec<Panel> = heap.into_vec();
            all.extend(finished);
            return Ok(assemble(&mut all, evaluations, true));
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                // every remaining panel sits at its roundoff floor
                return Ok(assemble(&mut finished, evaluations, false));
            }
        };
        if worst.roundoff_limited || too_small(worst.a, worst.b) {
            finished.push(worst);
            continue;
        }
        if evaluations + 30 > opts.max_evals {
            let mut all: Vec<Panel> = heap.into_vec();
            all.push(worst);
            all.extend(finished);
            let partial = assemble(&mut all, evaluations, false);
            return Err(Error::BudgetExceeded {
                cap: opts.max_evals,
                partial: Box::new(partial),
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(evaluate_panel(&eval, worst.a, mid, &mut evaluations)?);
        heap.push(evaluate_panel(&eval, mid, worst.b, &mut evaluations)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain<F: Fn(f64) -> Complex64>(f: F) -> impl Fn(&[f64]) -> Result<Vec<Sample>> {
        move |xs: &[f64]| Ok(xs.iter().map(|&x| Sample::plain(f(x))).collect())
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_panel_for_low_degree() {
        // both embedded rules are exact up to degree 13, so no split is needed
        let opts = QuadOptions::default();
        let r = adaptive(plain(|x| Complex64::new(x.powi(13) + x.powi(4), 0.0)), &[0.0, 1.0], &opts).unwrap();
        assert!((r.value.re - (1.0 / 14.0 + 0.2)).abs() < 1e-15);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn nonfinite_is_reported() {
        let opts = QuadOptions::default();
        let err = adaptive(plain(|_| Complex64::new(f64::NAN, 0.0)), &[0.0, 1.0], &opts).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn budget_is_enforced() {
        let opts = QuadOptions { tol: 1e-14, rel_tol: 0.0, max_evals: 200 };
        let err = adaptive(plain(|x| Complex64::new(x.sqrt().recip(), 0.0)), &[0.0, 1.0], &opts).unwrap_err();
        match err {
            Error::BudgetExceeded { cap, partial } => {
                assert_eq!(cap, 200);
                assert!(!partial.converged);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
