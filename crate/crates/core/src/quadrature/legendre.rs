//! Fixed Gauss–Legendre rules and their composite tensor products.

use super::Rect;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite tensor Gauss–Legendre rule on a rectangle: `panels × panels` cells,
/// `order × order` nodes per cell.
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl TensorRule {
    pub fn new(rect: Rect, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let hx = rect.width() / panels as f64;
        let hy = rect.height() / panels as f64;
        let mut points = Vec::with_capacity(panels * panels * order * order);
        let mut weights = Vec::with_capacity(points.capacity());
        for py in 0..panels {
            let cy = rect.y0 + (py as f64 + 0.5) * hy;
            for px in 0..panels {
                let cx = rect.x0 + (px as f64 + 0.5) * hx;
                for (&yj, &wj) in x.iter().zip(w.iter()) {
                    for (&xi, &wi) in x.iter().zip(w.iter()) {
                        points.push((cx + 0.5 * hx * xi, cy + 0.5 * hy * yj));
                        weights.push(0.25 * hx * hy * wi * wj);
                    }
                }
            }
        }
        TensorRule { points, weights }
    }

    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(self.weights.iter()).map(|(&(x, y), &w)| w * f(x, y)).sum()
    }

    /// Weighted mean `Σ w v / Σ w` of precomputed values at the rule's points.
    pub fn mean_of(&self, values: &[f64]) -> f64 {
        let num: f64 = values.iter().zip(self.weights.iter()).map(|(v, w)| v * w).sum();
        let den: f64 = self.weights.iter().sum();
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 8, 16] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn tensor_rule_area() {
        let r = TensorRule::new(Rect::new(0.0, 2.0, -1.0, 0.5), 3, 4);
        assert!((r.integrate(|_, _| 1.0) - 3.0).abs() < 1e-14);
        assert!((r.integrate(|x, y| x * y * y) - 2.0 * 1.125 / 3.0).abs() < 1e-13);
    }
}
