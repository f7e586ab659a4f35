use serde::{Deserialize, Serialize};

use crate::equilibrium::{GridMeasure, VectorEquilibriumSolution};

/// A cut on the real axis, or on the imaginary axis given by the range of `t`
/// in `z = it`. Unbounded cuts use infinite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cut {
    Real([f64; 2]),
    Imaginary([f64; 2]),
}

impl Cut {
    pub fn contains_origin(&self) -> bool {
        let [a, b] = match self {
            Cut::Real(i) | Cut::Imaginary(i) => *i,
        };
        a <= 0.0 && 0.0 <= b
    }
}

/// Cuts of the four sheets; `cuts[j]` belongs to `ℛ_{j+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetStructure {
    pub cuts: [Vec<Cut>; 4],
}

impl SheetStructure {
    /// Every sheet has a cut through the origin.
    pub fn all_sheets_meet_at_origin(&self) -> bool {
        self.cuts.iter().all(|c| c.iter().any(Cut::contains_origin))
    }
}

/// `ℛ₁: S(μ₁)`, `ℛ₂: S(μ₁) ∪ S(σ₂ − μ₂)`, `ℛ₃: S(σ₂ − μ₂) ∪ S(μ₃)`, `ℛ₄: S(μ₃)`,
/// assembled from the solution's endpoints. Gaps narrower than two cells of
/// their grid are below resolution and treated as closed.
pub fn sheet_structure(sol: &VectorEquilibriumSolution) -> SheetStructure {
    let e = sol.endpoints;
    let resolved = |c: f64, g: &GridMeasure| if c > 2.0 * g.width() { c } else { 0.0 };
    let split = |outer: f64, c: f64, make: fn([f64; 2]) -> Cut| {
        if c > 0.0 {
            vec![make([-outer, -c]), make([c, outer])]
        } else {
            vec![make([-outer, outer])]
        }
    };
    let inf = f64::INFINITY;
    let s1 = split(e.a, resolved(e.c1, &sol.mu1), Cut::Real);
    let s2 = split(inf, resolved(e.c2, &sol.mu2), Cut::Imaginary);
    let s3 = split(inf, resolved(e.c3, &sol.mu3), Cut::Real);
    SheetStructure {
        cuts: [
            s1.clone(),
            [s1, s2.clone()].concat(),
            [s2, s3.clone()].concat(),
            s3,
        ],
    }
}
