use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::one_matrix::loop_polynomial;
use crate::equilibrium::GridMeasure;
use crate::error::{Error, Result};
use crate::model::Polynomial;

pub const DEFAULT_MULTIPLICITY_TOL: f64 = 1e-6;

/// `Σ c[i][j] xⁱ ξʲ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateCurve {
    pub coeffs: Vec<Vec<f64>>,
}

/// JSON form: coefficients scaled so that the highest power of `ξ` carries
/// coefficient one in its lowest `x` power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveExport {
    pub coeffs: Vec<Vec<f64>>,
    pub normalization: String,
}

impl BivariateCurve {
    /// Trims trailing zero rows and columns.
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        let cols = coeffs
            .iter()
            .map(|r| r.iter().rposition(|&c| c != 0.0).map_or(0, |k| k + 1))
            .max()
            .unwrap_or(0);
        let mut rows: Vec<Vec<f64>> = coeffs
            .into_iter()
            .map(|mut r| {
                r.resize(cols, 0.0);
                r
            })
            .collect();
        while rows.last().is_some_and(|r| r.iter().all(|&c| c == 0.0)) {
            rows.pop();
        }
        BivariateCurve { coeffs: rows }
    }

    /// Curve `Σ_i xⁱ P_i(ξ)`.
    pub fn from_rows(rows: &[Polynomial]) -> Self {
        BivariateCurve::new(rows.iter().map(|p| p.coeffs().to_vec()).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coeffs.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    pub fn degree_x(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn degree_xi(&self) -> usize {
        self.coeffs.first().map_or(0, |r| r.len().saturating_sub(1))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().flatten().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> BivariateCurve {
        BivariateCurve::new(self.coeffs.iter().map(|r| r.iter().map(|c| c * s).collect()).collect())
    }

    pub fn eval(&self, x: Complex64, xi: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, row| {
            let p = row.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &c| a * xi + c);
            acc * x + p
        })
    }

    /// The polynomial in `ξ` obtained by fixing `x = x0`.
    pub fn at_x(&self, x0: f64) -> Polynomial {
        let d = self.degree_xi();
        Polynomial::new(
            (0..=d)
                .map(|j| self.coeffs.iter().rev().fold(0.0, |acc, row| acc * x0 + row.get(j).copied().unwrap_or(0.0)))
                .collect(),
        )
    }

    /// Scaled so that the coefficient of `x^{i₀} ξ^{d}` is one, `d` the degree
    /// in `ξ` and `i₀` the lowest power of `x` multiplying it.
    pub fn normalized(&self) -> BivariateCurve {
        let d = self.degree_xi();
        let lead = self.coeffs.iter().map(|r| r.get(d).copied().unwrap_or(0.0)).find(|&c| c != 0.0);
        match lead {
            Some(c) => self.scale(1.0 / c),
            None => self.clone(),
        }
    }

    pub fn export(&self) -> CurveExport {
        CurveExport {
            coeffs: self.normalized().coeffs,
            normalization: "monic-in-xi-leading".into(),
        }
    }

    /// Largest coefficientwise difference after normalizing both curves.
    pub fn distance(&self, other: &BivariateCurve) -> f64 {
        let (a, b) = (self.normalized(), other.normalized());
        let rows = a.coeffs.len().max(b.coeffs.len());
        let cols = a.degree_xi().max(b.degree_xi()) + 1;
        (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| (a.get(i, j) - b.get(i, j)).abs())
            .fold(0.0, f64::max)
    }
}

/// `W_eff(y) = W(y) − ½τ²y²`.
pub fn w_effective(w: &Polynomial, tau: f64) -> Polynomial {
    shift_quadratic(w, -0.5 * tau * tau)
}

/// Adds `c·y²` to `w`.
pub fn shift_quadratic(w: &Polynomial, c: f64) -> Polynomial {
    w + &Polynomial::monomial(2, c)
}

/// `√(−W_eff″(0)/2)`.
pub fn tau_critical(w_eff: &Polynomial) -> Result<f64> {
    let second = 2.0 * w_eff.coeff(2);
    if second >= 0.0 || !second.is_finite() {
        return Err(Error::NonNegativeSecondDerivative(second));
    }
    Ok((-second / 2.0).sqrt())
}

/// `τ(x − τξ)(W_eff′(ξ) + τ²ξ − τx) − Q(ξ)` with
/// `Q(ξ) = ∫ (W_eff′(ξ) − W_eff′(t))/(ξ − t) dμ(t)` contracted from `moments`.
pub fn spectral_curve_from_moments(w: &Polynomial, tau: f64, moments: &[f64]) -> BivariateCurve {
    let w_eff = w_effective(w, tau);
    let q = loop_polynomial(&w_eff, moments);
    let t2 = tau * tau;
    let a = &w_eff.derivative() + &Polynomial::monomial(1, t2);
    let xi = Polynomial::monomial(1, 1.0);
    let row0 = &(&xi * &a).scale(-t2) - &q;
    let row1 = &a.scale(tau) + &Polynomial::monomial(1, t2 * tau);
    let row2 = Polynomial::constant(-t2);
    BivariateCurve::from_rows(&[row0, row1, row2])
}

/// Spectral curve for quadratic `V` from the equilibrium measure `mu` of
/// `W_eff`.
pub fn spectral_curve_quadratic_v(w: &Polynomial, tau: f64, mu: &GridMeasure) -> BivariateCurve {
    let deg = w.degree().saturating_sub(1);
    spectral_curve_from_moments(w, tau, &mu.moments(deg))
}

/// Largest `m` with `|∂ʲ_ξ E(x0, ξ0)| ≤ tol·scale` for every `j < m`, where
/// `scale` is the largest coefficient of the curve.
pub fn root_multiplicity(curve: &BivariateCurve, x0: f64, xi0: f64, tol: f64) -> Result<usize> {
    let p = curve.at_x(x0);
    if p.is_zero() {
        return Err(Error::Invalid(format!("curve vanishes identically at x = {x0}")));
    }
    let scale = curve.max_abs_coeff();
    let mut m = 0;
    let mut d = p;
    while !d.is_zero() && d.eval(xi0).abs() <= tol * scale {
        m += 1;
        d = d.derivative();
    }
    Ok(m)
}

/// `|∂ʲ_ξ E(x0, ξ0)| / scale` for `j = 0..=deg_ξ`.
pub fn derivative_table(curve: &BivariateCurve, x0: f64, xi0: f64) -> Vec<f64> {
    let scale = curve.max_abs_coeff();
    let p = curve.at_x(x0);
    (0..=curve.degree_xi())
        .map(|j| p.nth_derivative(j).eval(xi0).abs() / scale)
        .collect()
}
