use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which line a grid measure lives on. `ImaginaryRotated` grids are indexed by
/// the real parameter `t` of `z = it`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Real,
    ImaginaryRotated,
}

/// Piecewise-constant density on `cells` uniform cells of `[left, right]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeasure {
    pub left: f64,
    pub right: f64,
    pub cells: usize,
    pub density: Vec<f64>,
    pub axis: Axis,
    pub mass: f64,
}

impl GridMeasure {
    /// Empty template with zero density.
    pub fn template(left: f64, right: f64, cells: usize, axis: Axis, mass: f64) -> Result<Self> {
        if !(right > left) || cells == 0 {
            return Err(Error::Invalid(format!(
                "grid needs left < right and at least one cell, got [{left}, {right}] with {cells}"
            )));
        }
        Ok(GridMeasure {
            left,
            right,
            cells,
            density: vec![0.0; cells],
            axis,
            mass,
        })
    }

    pub fn width(&self) -> f64 {
        (self.right - self.left) / self.cells as f64
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.left + i as f64 * self.width()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.left + (i as f64 + 0.5) * self.width()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.center(i)).collect()
    }

    /// Cell masses `density · Δ`.
    pub fn masses(&self) -> Vec<f64> {
        let h = self.width();
        self.density.iter().map(|d| d * h).collect()
    }

    pub fn with_masses(&self, masses: &[f64]) -> Self {
        let h = self.width();
        GridMeasure {
            density: masses.iter().map(|m| m / h).collect(),
            ..self.clone()
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width()
    }

    pub fn max_density(&self) -> f64 {
        self.density.iter().fold(0.0_f64, |m, &d| m.max(d))
    }

    /// Density at a point (the value of the containing cell; zero outside).
    pub fn density_at(&self, x: f64) -> f64 {
        if x < self.left || x > self.right {
            return 0.0;
        }
        let i = ((x - self.left) / self.width()).floor() as usize;
        self.density[i.min(self.cells - 1)]
    }

    /// Exact moments `∫ x^k dμ`, `k = 0..=kmax`, of the piecewise-constant density.
    pub fn moments(&self, kmax: usize) -> Vec<f64> {
        let mut out = vec![0.0; kmax + 1];
        for i in 0..self.cells {
            let d = self.density[i];
            if d == 0.0 {
                continue;
            }
            let (a, b) = (self.edge(i), self.edge(i + 1));
            let (mut pa, mut pb) = (a, b);
            for (k, o) in out.iter_mut().enumerate() {
                *o += d * (pb - pa) / (k as f64 + 1.0);
                pa *= a;
                pb *= b;
            }
        }
        out
    }

    /// Largest `|ρ(x) − ρ(−x)|` over mirrored cells.
    pub fn asymmetry(&self) -> f64 {
        let n = self.cells;
        (0..n)
            .map(|i| (self.density[i] - self.density[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// Averages each cell with its mirror image.
    pub fn symmetrize(&mut self) {
        let n = self.cells;
        for i in 0..n / 2 {
            let m = 0.5 * (self.density[i] + self.density[n - 1 - i]);
            self.density[i] = m;
            self.density[n - 1 - i] = m;
        }
    }

    /// Cell averages of `f` using `q`-point Gauss–Legendre per cell.
    pub fn cell_averages<F: Fn(f64) -> f64>(&self, f: F, q: usize) -> Vec<f64> {
        let rule = crate::model::QuadratureRule::gauss_legendre(q);
        let h = self.width();
        (0..self.cells)
            .map(|i| {
                let c = self.center(i);
                rule.iter().map(|(x, w)| 0.5 * w * f(c + 0.5 * h * x)).sum()
            })
            .collect()
    }
}
