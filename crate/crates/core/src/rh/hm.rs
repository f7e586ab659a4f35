use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::airy;

/// Left end of the collocation interval.
const LEFT: f64 = -12.0;
const NEWTON_TOL: f64 = 1e-13;
const MAX_NEWTON: usize = 60;

/// Chebyshev interpolant on `[a, b]`: values of q, q′, q″ at the
/// Chebyshev–Lobatto points `x_j = m + h cos(πj/N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebInterp {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub q: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
}

impl ChebInterp {
    fn bary(&self, x: f64, f: &[f64]) -> f64 {
        let n = self.nodes.len() - 1;
        let (mut num, mut den) = (0.0, 0.0);
        for (j, (&xj, &fj)) in self.nodes.iter().zip(f).enumerate() {
            let d = x - xj;
            if d == 0.0 {
                return fj;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            num += w * fj / d;
            den += w / d;
        }
        num / den
    }

    /// (q, q′, q″) at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        (self.bary(x, &self.q), self.bary(x, &self.q1), self.bary(x, &self.q2))
    }
}

/// Hastings–McLeod solution sampled on a descending grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HMSolution {
    pub nu_grid: Vec<f64>,
    pub q: Vec<f64>,
    pub q_prime: Vec<f64>,
    pub interp: ChebInterp,
}

impl HMSolution {
    /// (q, q′) anywhere in the collocation interval.
    pub fn eval(&self, nu: f64) -> Result<(f64, f64)> {
        if !(self.interp.a..=self.interp.b).contains(&nu) {
            return Err(Error::Domain(format!(
                "ν = {nu} outside [{}, {}]",
                self.interp.a, self.interp.b
            )));
        }
        let (q, q1, _) = self.interp.eval(nu);
        Ok((q, q1))
    }

    pub fn nu_range(&self) -> (f64, f64) {
        (self.interp.a, self.interp.b)
    }

    /// Max of |q″ − 2q³ − νq| over the stored grid.
    pub fn residual(&self) -> f64 {
        self.nu_grid
            .iter()
            .map(|&nu| {
                let (q, _, q2) = self.interp.eval(nu);
                (q2 - 2.0 * q * q * q - nu * q).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Chebyshev–Lobatto points on `[a, b]` (descending) and the first
/// differentiation matrix.
fn cheb(n: usize, a: f64, b: f64) -> (Vec<f64>, DMatrix<f64>) {
    let t: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let c = |j: usize| {
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == n {
            2.0 * s
        } else {
            s
        }
    };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (t[i] - t[j]);
            }
        }
    }
    // negative-sum trick for the diagonal
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    let h = 0.5 * (b - a);
    let x = t.iter().map(|&ti| 0.5 * (a + b) + h * ti).collect();
    (x, d / h)
}

/// Large-negative-ν expansion `√(−ν/2)(1 + 1/(8ν³) − 73/(128ν⁶) + 10657/(1024ν⁹))`.
pub fn hm_left_asymptote(nu: f64) -> f64 {
    let n3 = nu * nu * nu;
    (-nu / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * n3) - 73.0 / (128.0 * n3 * n3) + 10657.0 / (1024.0 * n3 * n3 * n3))
}

/// Solve `q″ = 2q³ + νq` with `q ~ Ai(ν)` at `+∞` by Chebyshev collocation
/// and damped Newton on `[−12, nu_max]`. The left end is pinned to the
/// large-negative-ν expansion. Output is sampled on the descending grid
/// `nu_max, nu_max − step, …` down to `nu_min`.
pub fn hastings_mcleod(nu_min: f64, nu_max: f64, step: f64) -> Result<HMSolution> {
    if nu_max < 6.0 || nu_min < -10.0 || nu_min >= nu_max || !(step > 0.0) || nu_max > 20.0 {
        return Err(Error::Invalid(format!(
            "need −10 ≤ nu_min < nu_max, 6 ≤ nu_max ≤ 20, step > 0; got ({nu_min}, {nu_max}, {step})"
        )));
    }
    let (a, b) = (LEFT, nu_max);
    let len = b - a;
    let n = ((len / (4.0 * step)).round() as usize).clamp(160, 256);
    let (x, d1) = cheb(n, a, b);
    let d2 = &d1 * &d1;
    let right = airy(b)?.0;
    let left = hm_left_asymptote(a);

    let mut u = DVector::from_iterator(
        n + 1,
        x.iter().map(|&nu| {
            let ai = airy(nu).map(|v| v.0).unwrap_or(0.0);
            (nu.min(0.0).abs() / 2.0 + ai * ai).sqrt()
        }),
    );
    u[0] = right;
    u[n] = left;

    let residual = |u: &DVector<f64>| -> DVector<f64> {
        let mut r = &d2 * u;
        for i in 0..=n {
            r[i] -= 2.0 * u[i].powi(3) + x[i] * u[i];
        }
        r[0] = u[0] - right;
        r[n] = u[n] - left;
        r
    };

    let mut r = residual(&u);
    let mut norm = r.amax();
    let mut iters = 0;
    while norm > NEWTON_TOL {
        iters += 1;
        if iters > MAX_NEWTON {
            return Err(Error::NotConverged {
                iterations: MAX_NEWTON,
                residual: norm,
                tol: NEWTON_TOL,
            });
        }
        let mut jac = d2.clone();
        for i in 0..=n {
            jac[(i, i)] -= 6.0 * u[i] * u[i] + x[i];
        }
        for j in 0..=n {
            jac[(0, j)] = 0.0;
            jac[(n, j)] = 0.0;
        }
        jac[(0, 0)] = 1.0;
        jac[(n, n)] = 1.0;
        let du = jac.lu().solve(&r).ok_or(Error::NotConverged {
            iterations: iters,
            residual: norm,
            tol: NEWTON_TOL,
        })?;
        let mut lambda = 1.0;
        loop {
            let trial = &u - &du * lambda;
            let rt = residual(&trial);
            let nt = rt.amax();
            // the residual floor is set by roundoff in D², so a step that
            // cannot reduce it is still accepted
            if nt < norm || lambda < 1e-4 {
                u = trial;
                r = rt;
                norm = nt;
                break;
            }
            lambda *= 0.5;
        }
        if (&du * lambda).amax() < 1e-14 * u.amax() {
            break;
        }
    }

    let q1 = &d1 * &u;
    let q2 = &d2 * &u;
    let interp = ChebInterp {
        a,
        b,
        nodes: x,
        q: u.iter().copied().collect(),
        q1: q1.iter().copied().collect(),
        q2: q2.iter().copied().collect(),
    };

    let count = ((nu_max - nu_min) / step + 1e-9).floor() as usize;
    let mut nu_grid: Vec<f64> = (0..=count).map(|k| nu_max - k as f64 * step).collect();
    if nu_grid.last().is_some_and(|&v| v - nu_min > 1e-9 * step) {
        nu_grid.push(nu_min);
    }
    let (q, q_prime): (Vec<f64>, Vec<f64>) = nu_grid
        .iter()
        .map(|&nu| {
            let (q, q1, _) = interp.eval(nu);
            (q, q1)
        })
        .unzip();
    if let Some(bad) = q.iter().position(|&v| v <= 0.0) {
        return Err(Error::NotConverged {
            iterations: iters,
            residual: q[bad],
            tol: 0.0,
        });
    }
    Ok(HMSolution {
        nu_grid,
        q,
        q_prime,
        interp,
    })
}
