use serde::{Deserialize, Serialize};

use super::grid::GridMeasure;
use super::one_matrix::OneMatrixSolution;
use crate::model::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularKind {
    /// Outside the support, the variational inequality becomes an equality.
    ExteriorTouch,
    /// The density vanishes inside the support.
    InteriorZero,
    /// The density vanishes faster than a square root at an endpoint.
    SingularEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub location: f64,
    pub kind: SingularKind,
    pub exponent: f64,
}

/// Interior local minima below this fraction of the maximal density are
/// examined as possible zeros.
const INTERIOR_CANDIDATE: f64 = 0.02;
/// A fitted exponent at least this large marks a zero of order `2m`, `m ≥ 1`
/// (or an edge of order `2m + ½`).
const SINGULAR_EXPONENT: f64 = 1.5;
/// Gaps narrower than this many cells come from thresholding a zero.
const TINY_GAP_CELLS: f64 = 8.0;
/// Exterior closeness of the effective potential to the level constant.
const EXTERIOR_TOUCH: f64 = 1e-3;

/// Least-squares slope of `log ρ` against `log d` over cells whose distance
/// `d` from `x0` lies in `[dmin, dmax]` on the requested side(s).
fn fit_exponent(g: &GridMeasure, x0: f64, dmin: f64, dmax: f64, side: i8) -> Option<f64> {
    let mut pts = Vec::new();
    for i in 0..g.cells {
        let x = g.center(i);
        let d = x - x0;
        if (side > 0 && d <= 0.0) || (side < 0 && d >= 0.0) {
            continue;
        }
        let ad = d.abs();
        if ad >= dmin && ad <= dmax && g.density[i] > 0.0 {
            pts.push((ad.ln(), g.density[i].ln()));
        }
    }
    if pts.len() < 4 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fitted vanishing exponent at every support endpoint (≈ ½ at a regular edge).
pub fn edge_exponents(sol: &OneMatrixSolution) -> Vec<(f64, f64)> {
    interval_edge_exponents(&sol.measure, &sol.support_intervals)
}

fn interval_edge_exponents(g: &GridMeasure, intervals: &[[f64; 2]]) -> Vec<(f64, f64)> {
    let h = g.width();
    let mut out = Vec::new();
    for iv in intervals {
        let len = iv[1] - iv[0];
        let (dmin, dmax) = ((3.0 * h).max(len / 80.0), len / 8.0);
        if let Some(e) = fit_exponent(g, iv[0], dmin, dmax, 1) {
            out.push((iv[0], e));
        }
        if let Some(e) = fit_exponent(g, iv[1], dmin, dmax, -1) {
            out.push((iv[1], e));
        }
    }
    out
}

/// Interior zeros and higher-order edges of a density with the given
/// (thresholded) support intervals.
pub fn density_singularities(g: &GridMeasure, ivs: &[[f64; 2]]) -> Vec<SingularPoint> {
    let h = g.width();
    let max = g.max_density();
    let mut out = Vec::new();
    let span = match (ivs.first(), ivs.last()) {
        (Some(f), Some(l)) => l[1] - f[0],
        _ => return out,
    };
    let (dmin, dmax) = ((4.0 * h).max(span / 40.0), span / 10.0);

    let mut candidates = Vec::new();
    // thresholding splits the support at a zero; tiny gaps are zeros, not cuts
    for w in ivs.windows(2) {
        if w[1][0] - w[0][1] <= TINY_GAP_CELLS * h {
            candidates.push(0.5 * (w[0][1] + w[1][0]));
        }
    }
    for iv in ivs {
        for i in 1..g.cells - 1 {
            let x = g.center(i);
            if x - iv[0] < 5.0 * h || iv[1] - x < 5.0 * h {
                continue;
            }
            let d = g.density[i];
            if d < INTERIOR_CANDIDATE * max && d <= g.density[i - 1] && d < g.density[i + 1] {
                // equal neighbours put the minimum on their shared edge
                let x0 = if d == g.density[i - 1] { g.edge(i) } else { x };
                candidates.push(x0);
            }
        }
    }
    for x0 in candidates {
        if let Some(e) = fit_exponent(g, x0, dmin, dmax, 0) {
            if e >= SINGULAR_EXPONENT {
                out.push(SingularPoint {
                    location: x0,
                    kind: SingularKind::InteriorZero,
                    exponent: e,
                });
            }
        }
    }
    for (loc, e) in interval_edge_exponents(g, ivs) {
        let next_to_zero = out
            .iter()
            .any(|p| p.kind == SingularKind::InteriorZero && (p.location - loc).abs() <= TINY_GAP_CELLS * h);
        if e >= SINGULAR_EXPONENT && !next_to_zero {
            out.push(SingularPoint {
                location: loc,
                kind: SingularKind::SingularEdge,
                exponent: e,
            });
        }
    }
    out
}

/// Flags interior zeros, higher-order edges and exterior touching points of
/// a one-matrix equilibrium measure.
pub fn detect_singularity(sol: &OneMatrixSolution, v: &Polynomial) -> Vec<SingularPoint> {
    let g = &sol.measure;
    let h = g.width();
    let ivs = &sol.support_intervals;
    let mut out = density_singularities(g, ivs);
    let u = sol.effective_potential(v);
    let gap: Vec<f64> = u.iter().map(|u| u - sol.ell).collect();
    let far = |x: f64| ivs.iter().all(|iv| x < iv[0] - 5.0 * h || x > iv[1] + 5.0 * h);
    for i in 1..g.cells - 1 {
        let x = g.center(i);
        if !far(x) {
            continue;
        }
        if gap[i] < EXTERIOR_TOUCH && gap[i] <= gap[i - 1] && gap[i] < gap[i + 1] {
            out.push(SingularPoint {
                location: x,
                kind: SingularKind::ExteriorTouch,
                exponent: f64::NAN,
            });
        }
    }
    out
}
