//! Convex quadratic programs over products of capped simplices.
//!
//! Energy `½ xᵀHx + cᵀx` with one mass constraint per block and a cellwise
//! box `0 ≤ x ≤ upper`. Solved by monotone FISTA, then polished with a
//! primal-dual active-set iteration on the KKT system.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::projection::project_capped_simplex;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct BlockQp {
    n: usize,
    /// Row-major symmetric Hessian.
    h: Vec<f64>,
    pub c: Vec<f64>,
    pub blocks: Vec<Range<usize>>,
    pub masses: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct QpOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub energies: Vec<f64>,
    pub residuals: Vec<f64>,
    pub polished: bool,
}

impl BlockQp {
    pub fn new(
        n: usize,
        h: Vec<f64>,
        c: Vec<f64>,
        blocks: Vec<Range<usize>>,
        masses: Vec<f64>,
        upper: Vec<f64>,
    ) -> Self {
        assert_eq!(h.len(), n * n);
        assert_eq!(c.len(), n);
        assert_eq!(upper.len(), n);
        BlockQp {
            n,
            h,
            c,
            blocks,
            masses,
            upper,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.n + j]
    }

    pub fn hess_apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        self.h
            .par_chunks(n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.hess_apply(x);
        g.iter_mut().zip(&self.c).for_each(|(g, c)| *g += c);
        g
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        let hx = self.hess_apply(x);
        x.iter()
            .zip(&hx)
            .zip(&self.c)
            .map(|((x, hx), c)| x * (0.5 * hx + c))
            .sum()
    }

    fn block_upper(&self, b: usize) -> Option<&[f64]> {
        let r = self.blocks[b].clone();
        if self.upper[r.clone()].iter().all(|u| u.is_infinite()) {
            None
        } else {
            Some(&self.upper[r])
        }
    }

    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        for (b, r) in self.blocks.iter().enumerate() {
            let p = project_capped_simplex(&y[r.clone()], self.masses[b], self.block_upper(b))?;
            out[r.clone()].copy_from_slice(&p);
        }
        Ok(out)
    }

    /// Level constant of each block: mean effective potential over free cells.
    pub fn levels(&self, x: &[f64], g: &[f64]) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|r| {
                let scale = r.clone().map(|i| x[i]).fold(0.0, f64::max);
                let thr = 1e-9 * scale;
                let (mut s, mut w) = (0.0, 0.0);
                for i in r.clone() {
                    if x[i] > thr && x[i] < self.upper[i] - thr {
                        s += g[i] * x[i];
                        w += x[i];
                    }
                }
                if w > 0.0 {
                    s / w
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Per-block variational residual: equality on free cells, inequality
    /// direction on cells at a bound.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let g = self.gradient(x);
        let levels = self.levels(x, &g);
        self.blocks
            .iter()
            .enumerate()
            .map(|(b, r)| {
                let ell = levels[b];
                let scale = r.clone().map(|i| x[i]).fold(0.0, f64::max);
                if scale <= 0.0 {
                    // no support: the level is undefined and the mass condition fails
                    return f64::INFINITY;
                }
                let thr = 1e-9 * scale;
                r.clone()
                    .map(|i| {
                        let d = g[i] - ell;
                        if self.upper[i] <= thr {
                            // pinned at zero by a vanishing cap
                            0.0
                        } else if x[i] <= thr {
                            (-d).max(0.0)
                        } else if x[i] >= self.upper[i] - thr {
                            d.max(0.0)
                        } else {
                            d.abs()
                        }
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Largest eigenvalue of `H` (Lipschitz constant of the gradient).
    pub fn lipschitz(&self) -> f64 {
        super::logkernel::power_iteration(self.n, |v| self.hess_apply(v), 60)
    }

    /// Monotone FISTA from a feasible `x0`; stops when every block residual is
    /// at most `tol` (checked every `check_every` iterations) or after `iters`.
    pub fn fista(&self, x0: Vec<f64>, iters: usize, tol: f64) -> Result<QpOutcome> {
        let check_every = 25;
        let mut lip = 1.05 * self.lipschitz();
        let mut x = x0;
        let mut ex = self.energy(&x);
        let mut y = x.clone();
        let mut t = 1.0f64;
        let mut energies = vec![ex];
        let mut it = 0;
        while it < iters {
            it += 1;
            let gy = self.gradient(&y);
            let ey: f64 = y.iter().zip(&gy).zip(&self.c).map(|((y, g), c)| 0.5 * y * (g + c)).sum();
            let (z, ez) = loop {
                let step: Vec<f64> = y.iter().zip(&gy).map(|(y, g)| y - g / lip).collect();
                let z = self.project(&step)?;
                let ez = self.energy(&z);
                let d: Vec<f64> = z.iter().zip(&y).map(|(a, b)| a - b).collect();
                let bound = ey
                    + d.iter().zip(&gy).map(|(d, g)| d * g).sum::<f64>()
                    + 0.5 * lip * d.iter().map(|d| d * d).sum::<f64>();
                if ez <= bound + 1e-12 * bound.abs().max(1.0) {
                    break (z, ez);
                }
                lip *= 2.0;
            };
            let x_prev = x.clone();
            if ez <= ex {
                x = z.clone();
                ex = ez;
            }
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = (0..self.n)
                .map(|i| x[i] + (t / t_next) * (z[i] - x[i]) + ((t - 1.0) / t_next) * (x[i] - x_prev[i]))
                .collect();
            t = t_next;
            energies.push(ex);
            if it % check_every == 0 && self.residuals(&x).iter().all(|&r| r <= tol) {
                break;
            }
        }
        let residuals = self.residuals(&x);
        Ok(QpOutcome {
            x,
            iterations: it,
            energies,
            residuals,
            polished: false,
        })
    }

    /// Primal-dual active-set iteration started from the bound pattern of `x`.
    /// Returns the exact KKT point if the active sets settle.
    pub fn active_set(&self, x: &[f64], max_iter: usize) -> Option<Vec<f64>> {
        #[derive(Clone, Copy, PartialEq)]
        enum State {
            Lower,
            Free,
            Upper,
        }
        let nb = self.blocks.len();
        let block_of: Vec<usize> = {
            let mut v = vec![0; self.n];
            for (b, r) in self.blocks.iter().enumerate() {
                v[r.clone()].iter_mut().for_each(|e| *e = b);
            }
            v
        };
        let pinned: Vec<bool> = (0..self.n)
            .map(|i| {
                let scale = self.blocks[block_of[i]].clone().map(|j| x[j]).fold(0.0, f64::max);
                self.upper[i] <= 1e-7 * scale
            })
            .collect();
        let mut state: Vec<State> = (0..self.n)
            .map(|i| {
                let scale = self.blocks[block_of[i]].clone().map(|j| x[j]).fold(0.0, f64::max);
                let thr = 1e-7 * scale;
                if self.upper[i] <= thr {
                    State::Upper
                } else if x[i] <= thr {
                    State::Lower
                } else if x[i] >= self.upper[i] - thr {
                    State::Upper
                } else {
                    State::Free
                }
            })
            .collect();
        for _ in 0..max_iter {
            let free: Vec<usize> = (0..self.n).filter(|&i| state[i] == State::Free).collect();
            let mut blocks_with_free = vec![false; nb];
            free.iter().for_each(|&i| blocks_with_free[block_of[i]] = true);
            if blocks_with_free.iter().any(|b| !b) {
                return None;
            }
            let nf = free.len();
            let dim = nf + nb;
            let mut k = DMatrix::<f64>::zeros(dim, dim);
            let mut rhs = DVector::<f64>::zeros(dim);
            let mut fixed = vec![0.0; self.n];
            for i in 0..self.n {
                if state[i] == State::Upper {
                    fixed[i] = self.upper[i];
                }
            }
            let h_fixed = self.hess_apply(&fixed);
            for (a, &i) in free.iter().enumerate() {
                for (bcol, &j) in free.iter().enumerate() {
                    k[(a, bcol)] = self.hess(i, j);
                }
                let b = block_of[i];
                k[(a, nf + b)] = -1.0;
                k[(nf + b, a)] = 1.0;
                rhs[a] = -self.c[i] - h_fixed[i];
            }
            for b in 0..nb {
                let fixed_mass: f64 = self.blocks[b].clone().map(|i| fixed[i]).sum();
                rhs[nf + b] = self.masses[b] - fixed_mass;
            }
            let sol = k.lu().solve(&rhs)?;
            let mut xn = fixed;
            for (a, &i) in free.iter().enumerate() {
                xn[i] = sol[a];
            }
            let ell: Vec<f64> = (0..nb).map(|b| sol[nf + b]).collect();
            let g = self.gradient(&xn);
            let mut changed = false;
            let mut next = state.clone();
            for i in 0..self.n {
                let d = g[i] - ell[block_of[i]];
                let s = match state[i] {
                    State::Free if xn[i] < 0.0 => State::Lower,
                    State::Free if xn[i] > self.upper[i] => State::Upper,
                    State::Lower if d < 0.0 => State::Free,
                    State::Upper if d > 0.0 && !pinned[i] => State::Free,
                    s => s,
                };
                if s != state[i] {
                    changed = true;
                }
                next[i] = s;
            }
            if !changed {
                return Some(xn);
            }
            state = next;
        }
        None
    }

    /// FISTA in chunks, trying an active-set polish after each chunk; a polish
    /// is kept only if it does not raise the energy or the residual.
    pub fn solve(&self, x0: Vec<f64>, iters: usize, tol: f64) -> Result<QpOutcome> {
        const CHUNK: usize = 400;
        let mut x = x0;
        let mut total = QpOutcome {
            x: Vec::new(),
            iterations: 0,
            energies: Vec::new(),
            residuals: Vec::new(),
            polished: false,
        };
        loop {
            let n = CHUNK.min(iters - total.iterations);
            let out = self.fista(x, n, tol)?;
            total.iterations += out.iterations;
            if total.energies.is_empty() {
                total.energies = out.energies;
            } else {
                total.energies.extend_from_slice(&out.energies[1..]);
            }
            x = out.x;
            total.residuals = out.residuals;
            let worst = |r: &[f64]| r.iter().fold(0.0_f64, |m, &v| m.max(v));
            if let Some(xp) = self.active_set(&x, 60) {
                let ep = self.energy(&xp);
                let e0 = *total.energies.last().unwrap_or(&f64::INFINITY);
                let rp = self.residuals(&xp);
                if ep <= e0 + 1e-13 * e0.abs().max(1.0) && worst(&rp) <= worst(&total.residuals) {
                    total.energies.push(ep.min(e0));
                    total.residuals = rp;
                    total.x = xp;
                    total.polished = true;
                    return Ok(total);
                }
            }
            if worst(&total.residuals) <= tol || total.iterations >= iters {
                total.x = x;
                return Ok(total);
            }
        }
    }
}
