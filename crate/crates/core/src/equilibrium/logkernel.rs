//! Cell-cell interaction matrices for the logarithmic energy.

use rayon::prelude::*;

use super::grid::GridMeasure;

/// Antiderivative pair of `log|u|`: `G'' = log|u|`, `G(0) = 0`.
fn g2(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        0.5 * u * u * u.abs().ln() - 0.75 * u * u
    }
}

/// Symmetric Toeplitz matrix of `∫∫ log 1/|x−y|` between unit masses spread
/// uniformly over cells of width `h`, stored by its first row.
#[derive(Debug, Clone)]
pub struct SelfKernel {
    row: Vec<f64>,
}

impl SelfKernel {
    pub fn new(cells: usize, h: f64) -> Self {
        let row = (0..cells)
            .map(|k| {
                let u = k as f64 * h;
                -(g2(u + h) - 2.0 * g2(u) + g2(u - h)) / (h * h)
            })
            .collect();
        SelfKernel { row }
    }

    pub fn for_grid(g: &GridMeasure) -> Self {
        SelfKernel::new(g.cells, g.width())
    }

    pub fn len(&self) -> usize {
        self.row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row[i.abs_diff(j)]
    }

    pub fn apply(&self, m: &[f64]) -> Vec<f64> {
        let n = self.row.len();
        (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| self.row[i.abs_diff(j)] * m[j]).sum())
            .collect()
    }

    pub fn quad(&self, m: &[f64]) -> f64 {
        dot(m, &self.apply(m))
    }
}

/// Dense matrix of `∫∫ log 1/|x − it|` between real-axis cells (rows) and
/// imaginary-axis cells (columns), 2-point Gauss in each cell.
#[derive(Debug, Clone)]
pub struct CrossKernel {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CrossKernel {
    pub fn new(real: &GridMeasure, imag: &GridMeasure) -> Self {
        let g = 0.5 / 3f64.sqrt();
        let (hx, ht) = (real.width(), imag.width());
        let xs: Vec<[f64; 2]> = (0..real.cells)
            .map(|i| {
                let c = real.center(i);
                [c - g * hx, c + g * hx]
            })
            .collect();
        let ts: Vec<[f64; 2]> = (0..imag.cells)
            .map(|j| {
                let c = imag.center(j);
                [c - g * ht, c + g * ht]
            })
            .collect();
        let data = xs
            .par_iter()
            .flat_map_iter(|xp| {
                ts.iter().map(move |tp| {
                    let mut s = 0.0;
                    for x in xp {
                        for t in tp {
                            s += -0.5 * (x * x + t * t).ln();
                        }
                    }
                    0.25 * s
                })
            })
            .collect();
        CrossKernel {
            rows: real.cells,
            cols: imag.cells,
            data,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// `C m` for `m` on the imaginary grid.
    pub fn apply(&self, m: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .into_par_iter()
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], m))
            .collect()
    }

    /// `Cᵀ m` for `m` on the real grid.
    pub fn apply_transpose(&self, m: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .into_par_iter()
            .map(|j| (0..self.rows).map(|i| self.data[i * self.cols + j] * m[i]).sum())
            .collect()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest eigenvalue of a symmetric operator by power iteration.
pub fn power_iteration<F: Fn(&[f64]) -> Vec<f64>>(n: usize, op: F, iters: usize) -> f64 {
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..iters {
        let norm = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let w = op(&v);
        lambda = dot(&v, &w);
        v = w;
    }
    lambda
}
