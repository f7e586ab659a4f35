use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::family::BiorthogonalFamily;
use super::line::transformed;
use crate::error::{Error, Result};
use crate::model::PotentialPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    K11,
    K12,
    K21,
    K22,
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "k11" | "11" => Ok(KernelKind::K11),
            "k12" | "12" => Ok(KernelKind::K12),
            "k21" | "21" => Ok(KernelKind::K21),
            "k22" | "22" => Ok(KernelKind::K22),
            other => Err(Error::Invalid(format!("unknown kernel '{other}'"))),
        }
    }
}

/// The four correlation kernels built from a biorthogonal family.
#[derive(Debug, Clone)]
pub struct KernelSet {
    pub family: BiorthogonalFamily,
    pp: PotentialPair,
}

impl KernelSet {
    pub fn new(family: BiorthogonalFamily) -> Result<Self> {
        let pp = family
            .pp
            .clone()
            .ok_or_else(|| Error::Invalid("family carries no potentials".into()))?;
        Ok(KernelSet { family, pp })
    }

    fn n(&self) -> f64 {
        self.family.n_scale as f64
    }

    /// `P_k(y) = ∫ p_k(x) e^{−n(W(y)+V(x)−τxy)} dx` for all `k`.
    pub fn big_p(&self, y: f64) -> Result<Vec<f64>> {
        let n = self.n();
        transformed(
            &self.family.p_coeffs,
            &self.pp.v_scaled(),
            self.pp.tau * y,
            n,
            -n * self.pp.w.eval(y),
        )
    }

    /// `Q_k(x) = ∫ q_k(y) e^{−n(W(y)+V(x)−τxy)} dy` for all `k`.
    pub fn big_q(&self, x: f64) -> Result<Vec<f64>> {
        let n = self.n();
        transformed(
            &self.family.q_coeffs,
            &self.pp.w,
            self.pp.tau * x,
            n,
            -n * self.pp.v_scaled().eval(x),
        )
    }

    fn weight(&self, x: f64, y: f64) -> f64 {
        (-self.n() * (self.pp.v_scaled().eval(x) + self.pp.w.eval(y) - self.pp.tau * x * y)).exp()
    }

    fn sum(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.family.h_sq)
            .map(|((u, v), h)| u * v / h)
            .sum()
    }

    fn p_values(&self, x: f64) -> Vec<f64> {
        (0..self.family.size).map(|k| self.family.p(k, x)).collect()
    }

    fn q_values(&self, y: f64) -> Vec<f64> {
        (0..self.family.size).map(|k| self.family.q(k, y)).collect()
    }

    pub fn k11(&self, x1: f64, x2: f64) -> Result<f64> {
        Ok(self.sum(&self.p_values(x1), &self.big_q(x2)?))
    }

    pub fn k12(&self, x: f64, y: f64) -> f64 {
        self.sum(&self.p_values(x), &self.q_values(y))
    }

    pub fn k21(&self, y: f64, x: f64) -> Result<f64> {
        Ok(self.sum(&self.big_p(y)?, &self.big_q(x)?) - self.weight(x, y))
    }

    pub fn k22(&self, y1: f64, y2: f64) -> Result<f64> {
        Ok(self.sum(&self.big_p(y1)?, &self.q_values(y2)))
    }

    pub fn eval(&self, which: KernelKind, u: f64, v: f64) -> Result<f64> {
        match which {
            KernelKind::K11 => self.k11(u, v),
            KernelKind::K12 => Ok(self.k12(u, v)),
            KernelKind::K21 => self.k21(u, v),
            KernelKind::K22 => self.k22(u, v),
        }
    }

    /// `K₁₁(x_i, x_j)` with each `Q_k(x_j)` computed once.
    pub fn k11_matrix(&self, xs: &[f64]) -> Result<DMatrix<f64>> {
        let qs = xs.iter().map(|&x| self.big_q(x)).collect::<Result<Vec<_>>>()?;
        let ps: Vec<Vec<f64>> = xs.iter().map(|&x| self.p_values(x)).collect();
        Ok(DMatrix::from_fn(xs.len(), xs.len(), |i, j| self.sum(&ps[i], &qs[j])))
    }
}

pub fn kernels(ks: &KernelSet, which: KernelKind, u: f64, v: f64) -> Result<f64> {
    ks.eval(which, u, v)
}

/// `det(K₁₁(x_i, x_j))`, the correlation function of the first matrix.
pub fn correlation_det(ks: &KernelSet, points: &[f64]) -> Result<f64> {
    for (i, a) in points.iter().enumerate() {
        if points[..i].contains(a) {
            return Err(Error::Invalid(format!("repeated point {a}")));
        }
    }
    Ok(ks.k11_matrix(points)?.determinant())
}
