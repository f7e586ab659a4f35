use serde::{Deserialize, Serialize};

use super::grid::GridMeasure;

/// Default support threshold relative to the maximal density.
pub const DEFAULT_THRESHOLD: f64 = 1e-3;

/// Endpoint data of a vector equilibrium solution.
///
/// `a` is the outer edge of `μ₁`, `c1` its inner gap edge, `c2` the half-width
/// of the window where `μ₂` saturates the constraint, `c3` the inner edge of
/// `μ₃`. Zero means no gap was detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Endpoints {
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// Root of the quadratic through three points closest to `guess`.
fn quadratic_root(xs: [f64; 3], ys: [f64; 3], guess: f64) -> Option<f64> {
    let [x0, x1, x2] = xs;
    let [y0, y1, y2] = ys;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    let b = d01 - a * (x0 + x1);
    let c = y0 - a * x0 * x0 - b * x0;
    if a.abs() < 1e-14 * b.abs().max(1e-300) {
        return if b != 0.0 { Some(-c / b) } else { None };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let r1 = (-b + s) / (2.0 * a);
    let r2 = (-b - s) / (2.0 * a);
    Some(if (r1 - guess).abs() < (r2 - guess).abs() { r1 } else { r2 })
}

/// Refines the edge between supported cell `inside` and unsupported cell
/// `outside` by a quadratic fit of `ρ²` on the three cells behind `inside`
/// (`ρ²` is locally linear at a square-root edge).
fn refine_edge(g: &GridMeasure, inside: usize, outside: usize) -> f64 {
    let h = g.width();
    let dir: isize = if outside > inside { 1 } else { -1 };
    let nominal = if dir > 0 { g.edge(inside + 1) } else { g.edge(inside) };
    let idx = |k: isize| inside as isize - dir * k;
    if idx(3) < 0 || idx(3) >= g.cells as isize {
        return nominal;
    }
    let pick = |k: isize| {
        let i = idx(k) as usize;
        (g.center(i), g.density[i] * g.density[i])
    };
    let (p1, p2, p3) = (pick(1), pick(2), pick(3));
    let root = quadratic_root([p3.0, p2.0, p1.0], [p3.1, p2.1, p1.1], nominal);
    match root {
        Some(r) if r.is_finite() => r.clamp(nominal - h, nominal + h),
        _ => nominal,
    }
}

/// Maximal runs of cells with density above `threshold · max`, as refined
/// intervals.
pub fn support_intervals(g: &GridMeasure, threshold: f64) -> Vec<[f64; 2]> {
    let thr = threshold * g.max_density();
    if thr <= 0.0 {
        return Vec::new();
    }
    let on: Vec<bool> = g.density.iter().map(|&d| d > thr).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < g.cells {
        if !on[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < g.cells && on[i] {
            i += 1;
        }
        let end = i - 1;
        let left = if start == 0 { g.left } else { refine_edge(g, start, start - 1) };
        let right = if end + 1 == g.cells { g.right } else { refine_edge(g, end, end + 1) };
        out.push([left, right]);
    }
    out
}

/// Half-width of the gap around the origin of a symmetric measure: the
/// refined inner edge of the support component to the right of 0, or 0 when
/// the origin is supported.
pub fn central_gap(g: &GridMeasure, threshold: f64) -> f64 {
    let intervals = support_intervals(g, threshold);
    if intervals.iter().any(|iv| iv[0] <= 0.0 && iv[1] >= 0.0) {
        return 0.0;
    }
    intervals
        .iter()
        .filter(|iv| iv[0] > 0.0)
        .map(|iv| iv[0])
        .fold(f64::INFINITY, f64::min)
        .min(g.right)
        .max(0.0)
}

/// Outermost refined edge on the positive side.
pub fn outer_edge(g: &GridMeasure, threshold: f64) -> f64 {
    support_intervals(g, threshold)
        .last()
        .map_or(0.0, |iv| iv[1])
}
