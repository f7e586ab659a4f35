use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleKind {
    GaussLegendre,
    TanhSinh,
}

/// Nodes and positive weights of an interpolatory rule on a finite interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term recurrence.
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
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule on `[-1, 1]`, exact through degree `2n - 1`.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton
            let mut x = ((i as f64 + 0.75) / (n as f64 + 0.5) * PI).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        QuadratureRule {
            nodes,
            weights,
            kind: RuleKind::GaussLegendre,
        }
    }

    /// Tanh-sinh rule on `[-1, 1]` with step `h = 2^-level`, truncated where
    /// weights drop below `1e-300`.
    pub fn tanh_sinh(level: u32) -> Self {
        let h = 0.5_f64.powi(level as i32);
        let mut pts = Vec::new();
        let mut k = 0i64;
        loop {
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let x = u.tanh();
            let w = h * 0.5 * PI * t.cosh() / u.cosh().powi(2);
            if w < 1e-300 || x >= 1.0 || pts.last().is_some_and(|&(px, _)| x <= px) {
                break;
            }
            pts.push((x, w));
            k += 1;
        }
        let mut nodes = Vec::with_capacity(2 * pts.len());
        let mut weights = Vec::with_capacity(2 * pts.len());
        for &(x, w) in pts.iter().skip(1).rev() {
            nodes.push(-x);
            weights.push(w);
        }
        for &(x, w) in &pts {
            nodes.push(x);
            weights.push(w);
        }
        QuadratureRule {
            nodes,
            weights,
            kind: RuleKind::TanhSinh,
        }
    }

    /// Affine map onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> Self {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        QuadratureRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
            kind: self.kind,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `order` points each.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> QuadratureRule {
    let base = QuadratureRule::gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let r = base.on_interval(a + p as f64 * h, a + (p + 1) as f64 * h);
        nodes.extend(r.nodes);
        weights.extend(r.weights);
    }
    QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::GaussLegendre,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1usize, 2, 5, 16, 40] {
            let r = QuadratureRule::gauss_legendre(n);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights.iter().all(|&w| w > 0.0));
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(deg as i32));
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "n={n} deg={deg} got={got} exact={exact}"
                );
            }
        }
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        let r = QuadratureRule::tanh_sinh(6);
        let got = r.integrate(|x| (1.0 - x * x).sqrt());
        assert!((got - PI / 2.0).abs() < 1e-13, "{got}");
        let got = r.integrate(|x| (1.0 + x).ln());
        assert!((got - (2.0 * 2f64.ln() - 2.0)).abs() < 1e-12, "{got}");
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn composite_matches_exact() {
        let r = composite_gauss(0.0, 3.0, 7, 6);
        let got = r.integrate(|x| x.exp());
        assert!((got - (3f64.exp() - 1.0)).abs() < 1e-12);
    }
}
