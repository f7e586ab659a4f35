use num_complex::Complex64;

use crate::equilibrium::GridMeasure;
use crate::error::{Error, Result};
use crate::model::{Polynomial, QuadratureRule};

/// `ξ(z) = V′(z) − ∫ dμ₁(s)/(z − s)`, integrating each cell with a 4-point
/// Gauss–Legendre rule.
pub fn xi_from_mu1(z: Complex64, v: &Polynomial, mu1: &GridMeasure) -> Result<Complex64> {
    let h = mu1.width();
    for i in 0..mu1.cells {
        if mu1.density[i] == 0.0 {
            continue;
        }
        let (a, b) = (mu1.edge(i), mu1.edge(i + 1));
        let dx = if z.re < a { a - z.re } else if z.re > b { z.re - b } else { 0.0 };
        if dx.hypot(z.im) < 2.0 * h {
            return Err(Error::TooCloseToSupport(format!("{z}")));
        }
    }
    let rule = QuadratureRule::gauss_legendre(4);
    let mut g = Complex64::new(0.0, 0.0);
    for i in 0..mu1.cells {
        let d = mu1.density[i];
        if d == 0.0 {
            continue;
        }
        let c = mu1.center(i);
        for (t, w) in rule.iter() {
            g += d * 0.5 * h * w / (z - (c + 0.5 * h * t));
        }
    }
    Ok(v.derivative().eval_complex(z) - g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::Axis;

    fn semicircle() -> GridMeasure {
        let mut g = GridMeasure::template(-3.0, 3.0, 600, Axis::Real, 1.0).unwrap();
        let rho = |x: f64| (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI);
        g.density = g.cell_averages(rho, 8);
        g
    }

    #[test]
    fn semicircle_satisfies_its_curve() {
        let g = semicircle();
        let v = Polynomial::new(vec![0.0, 0.0, 0.5]);
        for z in [Complex64::new(0.0, 3.0), Complex64::new(2.5, 0.0), Complex64::new(-1.0, 0.5)] {
            let xi = xi_from_mu1(z, &v, &g).unwrap();
            assert!((xi * xi - z * xi + 1.0).norm() < 1e-4, "{z}");
        }
    }

    #[test]
    fn large_z_asymptotics() {
        let g = semicircle();
        let v = Polynomial::new(vec![0.0, 0.0, 0.5]);
        let mut prev = f64::INFINITY;
        for r in [10.0, 20.0, 40.0] {
            let z = Complex64::new(0.0, r);
            let err = (xi_from_mu1(z, &v, &g).unwrap() - z + 1.0 / z).norm();
            assert!(err * r * r < 1.5);
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn refuses_points_on_the_support() {
        let g = semicircle();
        let v = Polynomial::new(vec![0.0, 0.0, 0.5]);
        assert!(matches!(
            xi_from_mu1(Complex64::new(1.0, 0.001), &v, &g),
            Err(Error::TooCloseToSupport(_))
        ));
    }
}
