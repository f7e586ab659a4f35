use serde::{Deserialize, Serialize};

use super::grid::{Axis, GridMeasure};
use super::logkernel::{CrossKernel, SelfKernel};
use super::qp::BlockQp;
use super::singularity::{density_singularities, SingularKind};
use super::supports::{central_gap, outer_edge, support_intervals, Endpoints, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::model::potential::{external_field_v1, external_field_v3, sigma2_density};
use crate::model::{Polynomial, PotentialPair};

pub const MASSES: [f64; 3] = [1.0, 2.0 / 3.0, 1.0 / 3.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorEquilibriumSolution {
    pub mu1: GridMeasure,
    pub mu2: GridMeasure,
    pub mu3: GridMeasure,
    /// Cell averages of the constraint density on the `mu2` grid.
    pub sigma2: Vec<f64>,
    pub endpoints: Endpoints,
    pub residuals: [f64; 3],
    pub regular: bool,
    pub alpha: f64,
    pub tau: f64,
    pub iterations: usize,
    #[serde(skip)]
    pub energies: Vec<f64>,
}

/// Default grids: `μ₁` on `[-6, 6]`, `μ₂` (parameter `t` of `z = it`) on
/// `[-8, 8]`, `μ₃` on `[-8, 8]`, 400 cells each.
pub fn default_grids(cells: usize) -> [GridMeasure; 3] {
    [
        GridMeasure::template(-6.0, 6.0, cells, Axis::Real, MASSES[0]).expect("valid grid"),
        GridMeasure::template(-8.0, 8.0, cells, Axis::ImaginaryRotated, MASSES[1]).expect("valid grid"),
        GridMeasure::template(-8.0, 8.0, cells, Axis::Real, MASSES[2]).expect("valid grid"),
    ]
}

/// `μ₁` on `[-inner, inner]`, `μ₂` and `μ₃` on `[-outer, outer]`. The last
/// two measures have unbounded support, so `outer` controls the truncation
/// error seen by `μ₁`.
pub fn wide_grids(inner: f64, outer: f64, cells: usize) -> Result<[GridMeasure; 3]> {
    Ok([
        GridMeasure::template(-inner, inner, cells, Axis::Real, MASSES[0])?,
        GridMeasure::template(-outer, outer, cells, Axis::ImaginaryRotated, MASSES[1])?,
        GridMeasure::template(-outer, outer, cells, Axis::Real, MASSES[2])?,
    ])
}

/// Assembled discrete energy of the vector problem.
pub struct VectorProblem {
    pub pp: PotentialPair,
    pub alpha: f64,
    pub grids: [GridMeasure; 3],
    pub sigma2: Vec<f64>,
    pub qp: BlockQp,
}

impl VectorProblem {
    pub fn new(alpha: f64, tau: f64, v: &Polynomial, grids: [GridMeasure; 3]) -> Result<Self> {
        if !v.is_even() {
            return Err(Error::Invalid(format!("V must be even, got {v}")));
        }
        let pp = PotentialPair::quartic(v.clone(), alpha, tau)?;
        let mut grids = grids;
        for (g, m) in grids.iter_mut().zip(MASSES) {
            g.mass = m;
        }
        grids[1].axis = Axis::ImaginaryRotated;
        let [g1, g2, g3] = &grids;
        let (n1, n2, n3) = (g1.cells, g2.cells, g3.cells);
        let n = n1 + n2 + n3;

        let v1 = g1.cell_averages(|x| external_field_v1(x, &pp).expect("even quartic W"), 4);
        let v3 = g3.cell_averages(|x| external_field_v3(x, &pp).expect("even quartic W"), 4);
        let sigma2 = g2.cell_averages(|t| sigma2_density(t, alpha, tau), 4);
        let h2 = g2.width();
        let available: f64 = sigma2.iter().sum::<f64>() * h2;
        if available < MASSES[1] {
            return Err(Error::InfeasibleConstraint {
                available,
                required: MASSES[1],
            });
        }

        let mut h = vec![0.0; n * n];
        let o2 = n1;
        let o3 = n1 + n2;
        for (off, g) in [(0, g1), (o2, g2), (o3, g3)] {
            let k = SelfKernel::for_grid(g);
            for i in 0..g.cells {
                for j in 0..g.cells {
                    h[(off + i) * n + off + j] = 2.0 * k.get(i, j);
                }
            }
        }
        for (off, g) in [(0, g1), (o3, g3)] {
            let c = CrossKernel::new(g, g2);
            for i in 0..g.cells {
                for j in 0..n2 {
                    let v = -c.get(i, j);
                    h[(off + i) * n + o2 + j] = v;
                    h[(o2 + j) * n + off + i] = v;
                }
            }
        }
        let mut c = vec![0.0; n];
        c[..n1].copy_from_slice(&v1);
        c[o3..].copy_from_slice(&v3);
        let mut upper = vec![f64::INFINITY; n];
        for j in 0..n2 {
            upper[o2 + j] = sigma2[j] * h2;
        }
        let qp = BlockQp::new(
            n,
            h,
            c,
            vec![0..n1, o2..o3, o3..n],
            MASSES.to_vec(),
            upper,
        );
        Ok(VectorProblem {
            pp,
            alpha,
            grids,
            sigma2,
            qp,
        })
    }

    fn offsets(&self) -> [usize; 3] {
        let n1 = self.grids[0].cells;
        [0, n1, n1 + self.grids[1].cells]
    }

    /// Symmetric feasible start: semicircle-like `μ₁`, `μ₂ = min(σ₂, uniform)`,
    /// `μ₃` uniform away from the origin.
    pub fn initial_point(&self) -> Result<Vec<f64>> {
        let [g1, g2, g3] = &self.grids;
        let mut x = Vec::with_capacity(self.qp.len());
        x.extend(g1.cell_averages(|s| (4.0 - s * s).max(0.0).sqrt(), 2).iter().map(|d| d * g1.width()));
        let flat = MASSES[1] / (g2.right - g2.left);
        x.extend(self.sigma2.iter().map(|s| s.min(flat) * g2.width()));
        let inner = 0.25 * (g3.right - g3.left).min(8.0);
        x.extend((0..g3.cells).map(|i| if g3.center(i).abs() > inner { g3.width() } else { 0.0 }));
        self.qp.project(&x)
    }

    pub fn split(&self, x: &[f64]) -> [GridMeasure; 3] {
        let o = self.offsets();
        let n = self.qp.len();
        let ranges = [o[0]..o[1], o[1]..o[2], o[2]..n];
        let mut out = self.grids.clone();
        for (k, r) in ranges.into_iter().enumerate() {
            out[k] = self.grids[k].with_masses(&x[r]);
        }
        out
    }

    pub fn join(&self, mus: [&GridMeasure; 3]) -> Vec<f64> {
        mus.iter().flat_map(|m| m.masses()).collect()
    }
}

/// Half-width of the central window on which `μ₂` saturates `σ₂`.
fn saturation_half_width(mu2: &GridMeasure, sigma2: &[f64], threshold: f64) -> f64 {
    let mut slack = mu2.clone();
    slack.density = sigma2.iter().zip(&mu2.density).map(|(s, m)| (s - m).max(0.0)).collect();
    central_gap(&slack, threshold)
}

/// Endpoints `a, c1, c2, c3` with the given relative threshold.
pub fn extract_supports(sol: &VectorEquilibriumSolution, threshold: f64) -> Endpoints {
    Endpoints {
        a: outer_edge(&sol.mu1, threshold),
        c1: central_gap(&sol.mu1, threshold),
        c2: saturation_half_width(&sol.mu2, &sol.sigma2, threshold),
        c3: central_gap(&sol.mu3, threshold),
    }
}

fn is_regular(mu1: &GridMeasure, mu2: &GridMeasure, sigma2: &[f64], mu3: &GridMeasure, e: &Endpoints) -> bool {
    let intervals = support_intervals(mu1, DEFAULT_THRESHOLD);
    let singular = density_singularities(mu1, &intervals)
        .iter()
        .any(|p| matches!(p.kind, SingularKind::InteriorZero | SingularKind::SingularEdge));
    if singular {
        return false;
    }
    let positive_at_origin = |g: &GridMeasure, d: &[f64]| {
        let i = g.cells / 2;
        let max = d.iter().fold(0.0_f64, |m, &v| m.max(v));
        d[i.saturating_sub(1)].min(d[i.min(g.cells - 1)]) > 0.02 * max
    };
    if e.c2 == 0.0 {
        // look only at a window comparable to the μ₁ support
        let slack: Vec<f64> = sigma2.iter().zip(&mu2.density).map(|(s, m)| s - m).collect();
        let w: Vec<f64> = (0..mu2.cells)
            .map(|i| if mu2.center(i).abs() <= e.a.max(1.0) { slack[i] } else { 0.0 })
            .collect();
        if !positive_at_origin(mu2, &w) {
            return false;
        }
    }
    if e.c3 == 0.0 && !positive_at_origin(mu3, &mu3.density) {
        return false;
    }
    true
}

/// Minimizes the discretized vector energy under the mass and `ν₂ ≤ σ₂`
/// constraints.
pub fn solve_vector_equilibrium(
    alpha: f64,
    tau: f64,
    v: &Polynomial,
    grids: [GridMeasure; 3],
    iters: usize,
    tol: f64,
) -> Result<VectorEquilibriumSolution> {
    let prob = VectorProblem::new(alpha, tau, v, grids)?;
    let x0 = prob.initial_point()?;
    let out = prob.qp.solve(x0, iters, tol)?;
    let [mut mu1, mut mu2, mut mu3] = prob.split(&out.x);
    let n1 = mu1.cells;
    let edge_mass = out.x[0] + out.x[n1 - 1];
    if edge_mass > 1e-6 {
        return Err(Error::GridTooNarrow { mass: edge_mass });
    }
    let worst = out.residuals.iter().fold(0.0_f64, |m, &r| m.max(r));
    if worst > tol {
        return Err(Error::NotConverged {
            residual: worst,
            iterations: out.iterations,
            tol,
        });
    }
    // the minimizer is symmetric; remove rounding-level asymmetry
    mu1.symmetrize();
    mu2.symmetrize();
    mu3.symmetrize();
    let mut sol = VectorEquilibriumSolution {
        mu1,
        mu2,
        mu3,
        sigma2: prob.sigma2.clone(),
        endpoints: Endpoints {
            a: 0.0,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
        },
        residuals: [out.residuals[0], out.residuals[1], out.residuals[2]],
        regular: false,
        alpha,
        tau,
        iterations: out.iterations,
        energies: out.energies,
    };
    sol.endpoints = extract_supports(&sol, DEFAULT_THRESHOLD);
    sol.regular = is_regular(&sol.mu1, &sol.mu2, &sol.sigma2, &sol.mu3, &sol.endpoints);
    Ok(sol)
}

/// Per-measure variational residuals of `sol` (recomputed from scratch).
pub fn variational_residuals(sol: &VectorEquilibriumSolution, v: &Polynomial) -> Result<[f64; 3]> {
    let prob = VectorProblem::new(
        sol.alpha,
        sol.tau,
        v,
        [sol.mu1.clone(), sol.mu2.clone(), sol.mu3.clone()],
    )?;
    let x = prob.join([&sol.mu1, &sol.mu2, &sol.mu3]);
    let r = prob.qp.residuals(&x);
    Ok([r[0], r[1], r[2]])
}
