use serde::{Deserialize, Serialize};

use super::line::window;
use crate::error::{Error, Result};
use crate::model::quadrature::composite_gauss;
use crate::model::Polynomial;

const PANEL_ORDER: usize = 20;

/// Three-term recurrence of the orthonormal polynomials for `e^{−nV}`:
/// `β_{k+1} ψ_{k+1} = (x − α_k) ψ_k − β_k ψ_{k−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recurrence {
    pub alpha: Vec<f64>,
    /// `beta[k]` couples `ψ_k` and `ψ_{k−1}`; `beta[0] = √μ₀`.
    pub beta: Vec<f64>,
    /// Log of the scale factored out of the weight.
    pub log_scale: f64,
}

/// Discretized Stieltjes procedure on a composite Gauss–Legendre rule, with
/// panels doubled until the coefficients settle.
pub fn recurrence(v: &Polynomial, n_scale: usize, size: usize) -> Result<Recurrence> {
    let n = n_scale as f64;
    let phi = |x: f64| -n * v.eval(x);
    let (a, b, peak) = window(&phi, 2 * size);
    let run = |panels: usize| -> Recurrence {
        let rule = composite_gauss(a, b, panels, PANEL_ORDER);
        let w: Vec<f64> = rule.iter().map(|(x, wt)| wt * (phi(x) - peak).exp()).collect();
        let xs = &rule.nodes;
        let mu0: f64 = w.iter().sum();
        let mut prev = vec![0.0; xs.len()];
        let mut cur = vec![1.0 / mu0.sqrt(); xs.len()];
        let mut alpha = Vec::with_capacity(size);
        let mut beta = vec![mu0.sqrt()];
        for k in 0..size {
            let ak: f64 = (0..xs.len()).map(|i| w[i] * xs[i] * cur[i] * cur[i]).sum();
            alpha.push(ak);
            if k + 1 == size {
                break;
            }
            let mut next: Vec<f64> = (0..xs.len())
                .map(|i| (xs[i] - ak) * cur[i] - if k == 0 { 0.0 } else { beta[k] * prev[i] })
                .collect();
            // one reorthogonalization pass against the two previous vectors
            for basis in [&cur, &prev] {
                let c: f64 = (0..xs.len()).map(|i| w[i] * next[i] * basis[i]).sum();
                for i in 0..xs.len() {
                    next[i] -= c * basis[i];
                }
            }
            let norm = (0..xs.len()).map(|i| w[i] * next[i] * next[i]).sum::<f64>().sqrt();
            for x in next.iter_mut() {
                *x /= norm;
            }
            beta.push(norm);
            prev = cur;
            cur = next;
        }
        Recurrence {
            alpha,
            beta,
            log_scale: peak,
        }
    };
    let mut panels = 16;
    let mut old = run(panels);
    loop {
        panels *= 2;
        let new = run(panels);
        let change = old
            .alpha
            .iter()
            .zip(&new.alpha)
            .chain(old.beta.iter().zip(&new.beta))
            .map(|(p, q)| (p - q).abs() / (1.0 + q.abs()))
            .fold(0.0, f64::max);
        if change < 1e-13 {
            return Ok(new);
        }
        if panels > 4096 {
            return Err(Error::QuadratureNotConverged { change });
        }
        old = new;
    }
}

impl Recurrence {
    pub fn size(&self) -> usize {
        self.alpha.len()
    }

    /// Orthonormal `ψ_0(x) .. ψ_{size−1}(x)` for the weight `e^{−nV − log_scale}`.
    pub fn orthonormal(&self, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.size());
        let mut prev = 0.0;
        let mut cur = 1.0 / self.beta[0];
        for k in 0..self.size() {
            out.push(cur);
            if k + 1 == self.size() {
                break;
            }
            let back = if k == 0 { 0.0 } else { self.beta[k] * prev };
            let next = ((x - self.alpha[k]) * cur - back) / self.beta[k + 1];
            prev = cur;
            cur = next;
        }
        out
    }

    /// Monic orthogonal polynomials `P_{k+1} = (x − α_k) P_k − β_k² P_{k−1}`.
    pub fn monic(&self) -> Vec<Polynomial> {
        let x = Polynomial::monomial(1, 1.0);
        let mut out = vec![Polynomial::constant(1.0)];
        for k in 0..self.size().saturating_sub(1) {
            let shifted = &(&x - &Polynomial::constant(self.alpha[k])) * &out[k];
            let next = if k == 0 {
                shifted
            } else {
                &shifted - &out[k - 1].scale(self.beta[k] * self.beta[k])
            };
            out.push(next);
        }
        out
    }
}

/// `K_n(x, y) = e^{−n(V(x)+V(y))/2} Σ_{k<size} ψ_k(x) ψ_k(y)` with `ψ_k`
/// orthonormal for `e^{−nV}`.
#[derive(Debug, Clone)]
pub struct OneMatrixKernel {
    pub v: Polynomial,
    pub n_scale: usize,
    pub rec: Recurrence,
}

impl OneMatrixKernel {
    pub fn new(v: &Polynomial, n_scale: usize, size: usize) -> Result<Self> {
        Ok(OneMatrixKernel {
            v: v.clone(),
            n_scale,
            rec: recurrence(v, n_scale, size)?,
        })
    }

    fn half_weight(&self, x: f64) -> f64 {
        (0.5 * (-(self.n_scale as f64) * self.v.eval(x) - self.rec.log_scale)).exp()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let a = self.rec.orthonormal(x);
        let b = self.rec.orthonormal(y);
        let s: f64 = a.iter().zip(&b).map(|(u, v)| u * v).sum();
        self.half_weight(x) * self.half_weight(y) * s
    }

    /// Monic orthogonal polynomials for `e^{−nV}`.
    pub fn monic(&self) -> Vec<Polynomial> {
        self.rec.monic()
    }
}

pub fn one_matrix_kernel(v: &Polynomial, n_scale: usize, size: usize, x: f64, y: f64) -> Result<f64> {
    Ok(OneMatrixKernel::new(v, n_scale, size)?.eval(x, y))
}
