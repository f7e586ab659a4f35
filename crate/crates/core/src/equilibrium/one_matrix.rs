use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{Axis, GridMeasure};
use super::logkernel::SelfKernel;
use super::qp::BlockQp;
use super::supports::{support_intervals, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::model::Polynomial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneMatrixSolution {
    pub measure: GridMeasure,
    pub support_intervals: Vec<[f64; 2]>,
    pub ell: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Discrete energy after every iteration (non-increasing).
    #[serde(skip)]
    pub energies: Vec<f64>,
}

impl OneMatrixSolution {
    /// `2∫log 1/|x−s| dμ(s) + V(x)` averaged over every cell.
    pub fn effective_potential(&self, v: &Polynomial) -> Vec<f64> {
        let k = SelfKernel::for_grid(&self.measure);
        let am = k.apply(&self.measure.masses());
        let field = self.measure.cell_averages(|x| v.eval(x), 4);
        am.iter().zip(&field).map(|(a, f)| 2.0 * a + f).collect()
    }
}

pub fn check_potential(v: &Polynomial) -> Result<()> {
    if v.degree() == 0 || v.degree() % 2 == 1 || v.leading() <= 0.0 {
        return Err(Error::NonConfiningWeight(format!(
            "V must have even degree and positive leading coefficient, got {v}"
        )));
    }
    Ok(())
}

fn semicircle_start(g: &GridMeasure) -> Vec<f64> {
    let mid = 0.5 * (g.left + g.right);
    let r = 0.25 * (g.right - g.left);
    let shape = g.cell_averages(|x| (r * r - (x - mid) * (x - mid)).max(0.0).sqrt(), 2);
    let s: f64 = shape.iter().sum();
    shape.iter().map(|v| v / s * g.mass).collect()
}

fn one_matrix_qp(v: &Polynomial, template: &GridMeasure) -> BlockQp {
    field_qp(&|x| v.eval(x), template)
}

fn field_qp(field: &dyn Fn(f64) -> f64, template: &GridMeasure) -> BlockQp {
    let n = template.cells;
    let k = SelfKernel::for_grid(template);
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] = 2.0 * k.get(i, j);
        }
    }
    let c = template.cell_averages(field, 4);
    BlockQp::new(n, h, c, vec![0..n], vec![template.mass], vec![f64::INFINITY; n])
}

/// Minimizes `∫∫ log 1/|x−y| dμdμ + ∫V dμ` over piecewise-constant densities
/// of mass `template.mass` on the template grid.
pub fn solve_one_matrix(
    v: &Polynomial,
    template: &GridMeasure,
    iters: usize,
    tol: f64,
) -> Result<OneMatrixSolution> {
    check_potential(v)?;
    solve_one_matrix_field(&|x| v.eval(x), template, iters, tol)
}

/// As [`solve_one_matrix`] for an arbitrary continuous confining field.
pub fn solve_one_matrix_field(
    field: &dyn Fn(f64) -> f64,
    template: &GridMeasure,
    iters: usize,
    tol: f64,
) -> Result<OneMatrixSolution> {
    let qp = field_qp(field, template);
    let x0 = qp.project(&semicircle_start(template))?;
    let out = qp.solve(x0, iters, tol)?;
    let mut measure = template.with_masses(&out.x);
    measure.axis = Axis::Real;
    let n = measure.cells;
    let edge_mass = (out.x[0] + out.x[n - 1]) / template.mass.max(1e-300);
    if edge_mass > 1e-6 {
        return Err(Error::GridTooNarrow { mass: edge_mass });
    }
    let residual = out.residuals[0];
    if residual > tol {
        return Err(Error::NotConverged {
            residual,
            iterations: out.iterations,
            tol,
        });
    }
    let g = qp.gradient(&out.x);
    let ell = qp.levels(&out.x, &g)[0];
    Ok(OneMatrixSolution {
        support_intervals: support_intervals(&measure, DEFAULT_THRESHOLD),
        measure,
        ell,
        residual,
        iterations: out.iterations,
        energies: out.energies,
    })
}

/// `Q(x) = ∫ (V'(x) − V'(s))/(x − s) dμ(s)` from the moments of `μ`.
pub fn loop_polynomial(v: &Polynomial, moments: &[f64]) -> Polynomial {
    let dv = v.derivative();
    let deg = dv.degree();
    let mut q = vec![0.0; deg.max(1)];
    // (x^j − s^j)/(x − s) = Σ_{i<j} x^i s^{j−1−i}
    for j in 1..=deg {
        let d = dv.coeff(j);
        if d == 0.0 {
            continue;
        }
        for (i, qi) in q.iter_mut().enumerate().take(j) {
            *qi += d * moments.get(j - 1 - i).copied().unwrap_or(0.0);
        }
    }
    Polynomial::new(q)
}

/// `(Q, R, gap)` with `R = V'²/4 − Q` and `gap` the sup over supported cells
/// of the difference between the cell averages of `(1/π)√(R₋)` and the
/// density of `mu`.
pub fn density_from_curve(v: &Polynomial, mu: &GridMeasure) -> (Polynomial, Polynomial, f64) {
    let dv = v.derivative();
    let q = loop_polynomial(v, &mu.moments(dv.degree()));
    let r = &(&dv * &dv).scale(0.25) - &q;
    let curve = mu.cell_averages(|x| (-r.eval(x)).max(0.0).sqrt() / PI, 8);
    let thr = DEFAULT_THRESHOLD * mu.max_density();
    let gap = curve
        .iter()
        .zip(&mu.density)
        .filter(|(_, &d)| d > thr)
        .map(|(c, d)| (c - d).abs())
        .fold(0.0, f64::max);
    (q, r, gap)
}

/// Sup of the variational residual of an arbitrary trial measure.
pub fn one_matrix_residual(v: &Polynomial, mu: &GridMeasure) -> f64 {
    let qp = one_matrix_qp(v, mu);
    qp.residuals(&mu.masses())[0]
}

/// Newton refinement of a support edge as a simple root of `R`. Returns the
/// guess unchanged when the root is not simple or lies too far away.
fn refine_edge_on_curve(r: &Polynomial, guess: f64, reach: f64) -> f64 {
    let dr = r.derivative();
    let mut x = guess;
    for _ in 0..60 {
        let d = dr.eval(x);
        if d == 0.0 {
            return guess;
        }
        let step = r.eval(x) / d;
        x -= step;
        if step.abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    if (x - guess).abs() <= reach && dr.eval(x).abs() >= 1e-4 {
        x
    } else {
        multiple_root_near(r, guess, reach).unwrap_or(guess)
    }
}

/// Centroid of the cluster of roots of `r` within `8·reach` of `guess`, when
/// the cluster has at least two members and sits on the real axis. A perturbed
/// root of multiplicity `m` splits by `O(ε^{1/m})` but its centroid moves by
/// `O(ε)`.
fn multiple_root_near(r: &Polynomial, guess: f64, reach: f64) -> Option<f64> {
    let near: Vec<Complex64> = r
        .roots()
        .into_iter()
        .filter(|z| (z - guess).norm() <= 8.0 * reach)
        .collect();
    if near.len() < 2 {
        return None;
    }
    let c = near.iter().sum::<Complex64>() / near.len() as f64;
    (c.im.abs() <= 1e-6 * (1.0 + c.re.abs())).then_some(c.re)
}

/// Moments of the equilibrium measure with most of the discretization error
/// removed: the outer support edges are located as simple roots of `R`, the
/// grid is re-laid so that they fall on cell boundaries, and solutions at
/// `cells` and `2·cells` are Richardson-combined (`O(Δ²)` leading error).
pub fn aligned_moments(
    v: &Polynomial,
    sol: &OneMatrixSolution,
    kmax: usize,
    cells: usize,
) -> Result<Vec<f64>> {
    const PAD: usize = 3;
    let want = kmax.max(v.degree());
    let edges = &sol.support_intervals;
    let (mut lo, mut hi) = match (edges.first(), edges.last()) {
        (Some(f), Some(l)) => (f[0], l[1]),
        _ => return Ok(sol.measure.moments(kmax)),
    };
    let solve_at = |lo: f64, hi: f64, n: usize| -> Result<Vec<f64>> {
        let h = (hi - lo) / n as f64;
        let t = GridMeasure::template(
            lo - PAD as f64 * h,
            hi + PAD as f64 * h,
            n + 2 * PAD,
            Axis::Real,
            sol.measure.mass,
        )?;
        let qp = one_matrix_qp(v, &t);
        let x0 = qp.project(&semicircle_start(&t))?;
        let out = qp.solve(x0, 20_000, 1e-12)?;
        Ok(t.with_masses(&out.x).moments(want))
    };
    let dv = v.derivative();
    let dv2 = (&dv * &dv).scale(0.25);
    let mut moments = sol.measure.moments(want);
    let mut reach = 3.0 * sol.measure.width();
    for _ in 0..2 {
        let r = &dv2 - &loop_polynomial(v, &moments);
        lo = refine_edge_on_curve(&r, lo, reach);
        hi = refine_edge_on_curve(&r, hi, reach);
        moments = solve_at(lo, hi, cells)?;
        reach = 3.0 * (hi - lo) / cells as f64;
    }
    let fine = solve_at(lo, hi, 2 * cells)?;
    Ok(moments
        .iter()
        .zip(&fine)
        .take(kmax + 1)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}
