use serde::{Deserialize, Serialize};

use super::curve::{derivative_table, root_multiplicity, spectral_curve_from_moments, w_effective, BivariateCurve};
use crate::equilibrium::one_matrix::aligned_moments;
use crate::equilibrium::{solve_one_matrix, Axis, GridMeasure, OneMatrixSolution};
use crate::error::{Error, Result};
use crate::model::Polynomial;

const CELLS: usize = 400;
const HALF_WIDTH: f64 = 3.0;

/// Preset couplings with quadratic `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveExample {
    /// `W = ¼y⁴ + ½(τ² − 2)y²`.
    One,
    /// `W = y⁶/6 − 2^{−4/3}y⁴ + ½(τ² − 2^{−1/3})y²`.
    Two,
    /// `W = (8/5)y + (1/5 + τ²/2)y² − (4/15)y³ + (1/20)y⁴`.
    Three,
}

impl CurveExample {
    pub fn from_index(k: u32) -> Result<Self> {
        match k {
            1 => Ok(CurveExample::One),
            2 => Ok(CurveExample::Two),
            3 => Ok(CurveExample::Three),
            _ => Err(Error::Invalid(format!("unknown example {k}, expected 1, 2 or 3"))),
        }
    }

    pub fn w(&self, tau: f64) -> Polynomial {
        let t2 = tau * tau;
        match self {
            CurveExample::One => Polynomial::new(vec![0.0, 0.0, 0.5 * (t2 - 2.0), 0.0, 0.25]),
            CurveExample::Two => example2_w(tau, Example2Reading::Displayed),
            CurveExample::Three => Polynomial::new(vec![0.0, 1.6, 0.2 + 0.5 * t2, -4.0 / 15.0, 0.05]),
        }
    }

    /// Coupling at which the example is critical.
    pub fn tau(&self) -> f64 {
        match self {
            CurveExample::One => 1.0,
            CurveExample::Two => 2f64.powf(-1.0 / 3.0),
            CurveExample::Three => 5f64.sqrt() / 5.0,
        }
    }

    /// `(x₀, ξ₀, m)`: the point where `m` roots `ξ` of the critical curve coincide.
    pub fn marked_point(&self) -> (f64, f64, usize) {
        match self {
            CurveExample::One => (0.0, 0.0, 4),
            CurveExample::Two => (0.0, 0.0, 6),
            CurveExample::Three => (4.0 / 5f64.sqrt(), 2.0, 4),
        }
    }
}

/// Equilibrium measure of `W_eff` on `[-3, 3]`.
pub fn solve_effective(w_eff: &Polynomial) -> Result<OneMatrixSolution> {
    let t = GridMeasure::template(-HALF_WIDTH, HALF_WIDTH, CELLS, Axis::Real, 1.0)?;
    solve_one_matrix(w_eff, &t, 20_000, 1e-10)
}

/// Spectral curve built from the solver's equilibrium measure of `W_eff`,
/// using edge-aligned, extrapolated moments.
pub fn solver_curve(w: &Polynomial, tau: f64) -> Result<BivariateCurve> {
    let w_eff = w_effective(w, tau);
    let sol = solve_effective(&w_eff)?;
    let deg = w_eff.degree().saturating_sub(1);
    let moments = aligned_moments(&w_eff, &sol, deg, CELLS)?;
    Ok(spectral_curve_from_moments(w, tau, &moments))
}

/// The sextic example admits two readings: its potential as displayed, and
/// the one whose `W_eff′ = ξ⁵ − 2^{2/3}ξ³ − 2^{1/3}ξ` matches the displayed
/// curve `2^{−4/3}ξ² + ξ⁴ + τ(x − τξ)(τx + 2^{1/3}ξ − τ²ξ + 2^{2/3}ξ³ − ξ⁵)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Example2Reading {
    Displayed,
    CurveConsistent,
}

pub fn example2_w(tau: f64, reading: Example2Reading) -> Polynomial {
    let quad = match reading {
        Example2Reading::Displayed => 2f64.powf(-1.0 / 3.0),
        Example2Reading::CurveConsistent => 2f64.powf(1.0 / 3.0),
    };
    Polynomial::new(vec![
        0.0,
        0.0,
        0.5 * (tau * tau - quad),
        0.0,
        -2f64.powf(-4.0 / 3.0),
        0.0,
        1.0 / 6.0,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example2Row {
    pub reading: Example2Reading,
    pub tau_label: String,
    pub tau: f64,
    pub multiplicity: usize,
    /// `|∂ʲ_ξ E(0, 0)| / max|coeff|`, `j = 0..=6`.
    pub derivatives: Vec<f64>,
    pub curve: BivariateCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example2Report {
    pub rows: Vec<Example2Row>,
}

impl Example2Report {
    /// Rows with a sextuple root at the origin.
    pub fn sextuple(&self) -> impl Iterator<Item = &Example2Row> {
        self.rows.iter().filter(|r| r.multiplicity == 6)
    }

    /// Whether the displayed potential has the sextuple root at either coupling.
    pub fn displayed_reproduces(&self) -> bool {
        self.sextuple().any(|r| r.reading == Example2Reading::Displayed)
    }
}

/// Multiplicity of `ξ = 0` at `x = 0` for both readings at both candidate
/// couplings `2^{−1/3}` and `2^{−2/3}`.
pub fn example2_analysis(tol: f64) -> Result<Example2Report> {
    let taus = [("2^(-1/3)", 2f64.powf(-1.0 / 3.0)), ("2^(-2/3)", 2f64.powf(-2.0 / 3.0))];
    let mut rows = Vec::new();
    for reading in [Example2Reading::Displayed, Example2Reading::CurveConsistent] {
        // W_eff does not depend on τ; solve once per reading
        let w_eff = w_effective(&example2_w(0.0, reading), 0.0);
        let sol = solve_effective(&w_eff)?;
        let moments = aligned_moments(&w_eff, &sol, w_eff.degree() - 1, CELLS)?;
        for (label, tau) in taus {
            let curve = spectral_curve_from_moments(&example2_w(tau, reading), tau, &moments);
            rows.push(Example2Row {
                reading,
                tau_label: label.into(),
                tau,
                multiplicity: root_multiplicity(&curve, 0.0, 0.0, tol)?,
                derivatives: derivative_table(&curve, 0.0, 0.0),
                curve,
            });
        }
    }
    Ok(Example2Report { rows })
}
