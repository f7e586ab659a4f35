use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::quadrature::composite_gauss;

/// Size of the neglected tail, as a log.
const LOG_CUTOFF: f64 = -41.5;
const PANEL_ORDER: usize = 16;
pub const PEARCEY_TOL: f64 = 1e-8;

/// A ray of the w contour: direction angle and +1 outward, −1 inward.
const W_RAYS: [(f64, f64); 4] = [
    (PI / 4.0, -1.0),
    (5.0 * PI / 4.0, -1.0),
    (-PI / 4.0, 1.0),
    (3.0 * PI / 4.0, 1.0),
];
/// The two halves of the imaginary axis, both traversed upward.
const Z_RAYS: [f64; 2] = [PI / 2.0, -PI / 2.0];

fn phi(w: Complex64, x: f64, s: f64) -> Complex64 {
    let w2 = w * w;
    w2 * w2 / 4.0 - s * w2 / 2.0 + x * w
}

fn psi(z: Complex64, y: f64, s: f64) -> Complex64 {
    let z2 = z * z;
    -z2 * z2 / 4.0 + s * z2 / 2.0 - y * z
}

/// Smallest radius beyond which `Re f` along the ray stays below `level`.
fn cutoff_radius(f: impl Fn(f64) -> f64, level: f64) -> f64 {
    let mut r: f64 = 60.0;
    // Re f is a quartic with negative leading term, so scan inward
    while r > 0.0 && f(r) <= level {
        r -= 0.01;
    }
    r.max(0.01) + 0.01
}

/// Pearcey kernel with the truncation radius multiplied by `radius_scale`,
/// at a fixed node count per dimension.
pub fn pearcey_raw(x: f64, y: f64, s: f64, nodes: usize, radius_scale: f64) -> Complex64 {
    // peak of the factor that is not decaying bounds how deep the tail must go
    let peak_w = W_RAYS
        .iter()
        .map(|&(a, _)| (0..2000).map(|k| phi(Complex64::from_polar(k as f64 * 0.005, a), x, s).re).fold(f64::MIN, f64::max))
        .fold(f64::MIN, f64::max);
    let peak_z = Z_RAYS
        .iter()
        .map(|&b| (0..2000).map(|k| psi(Complex64::from_polar(k as f64 * 0.005, b), y, s).re).fold(f64::MIN, f64::max))
        .fold(f64::MIN, f64::max);
    let lw = W_RAYS
        .iter()
        .map(|&(a, _)| cutoff_radius(|r| phi(Complex64::from_polar(r, a), x, s).re, LOG_CUTOFF - peak_z.max(0.0)))
        .fold(0.0, f64::max);
    let lz = Z_RAYS
        .iter()
        .map(|&b| cutoff_radius(|t| psi(Complex64::from_polar(t, b), y, s).re, LOG_CUTOFF - peak_w.max(0.0)))
        .fold(0.0, f64::max);
    let rho_max = 2.0 * lw.max(lz) * radius_scale;
    let panels = (nodes / PANEL_ORDER).max(1);
    let rho_rule = composite_gauss(0.0, rho_max, panels, PANEL_ORDER);
    let lam_rule = composite_gauss(0.0, 1.0, panels, PANEL_ORDER);
    let i = Complex64::i();

    // With r = ρλ and t = ρ(1−λ) the Jacobian ρ cancels the 1/(z − w) singularity.
    let mut total = Complex64::new(0.0, 0.0);
    for &(alpha, orient) in &W_RAYS {
        let ew = Complex64::from_polar(1.0, alpha);
        for &beta in &Z_RAYS {
            let ez = Complex64::from_polar(1.0, beta);
            let mut acc = Complex64::new(0.0, 0.0);
            for (lam, wl) in lam_rule.iter() {
                let denom = ez * (1.0 - lam) - ew * lam;
                let mut inner = Complex64::new(0.0, 0.0);
                for (rho, wr) in rho_rule.iter() {
                    let w = ew * (rho * lam);
                    let z = ez * (rho * (1.0 - lam));
                    inner += (phi(w, x, s) + psi(z, y, s)).exp() * wr;
                }
                acc += inner / denom * wl;
            }
            total += acc * (ew * orient * i);
        }
    }
    total / ((2.0 * PI * i) * (2.0 * PI * i))
}

/// Pearcey kernel `K(x, y; s)`, checked against a run with twice the nodes.
pub fn pearcey_kernel(x: f64, y: f64, s: f64, nodes: usize) -> Result<f64> {
    if nodes < 64 {
        return Err(Error::Invalid(format!("need at least 64 nodes, got {nodes}")));
    }
    let coarse = pearcey_raw(x, y, s, nodes, 1.0);
    let fine = pearcey_raw(x, y, s, 2 * nodes, 1.0);
    let change = (fine - coarse).norm();
    if change > PEARCEY_TOL {
        return Err(Error::QuadratureNotConverged { change });
    }
    if fine.im.abs() > PEARCEY_TOL {
        return Err(Error::QuadratureNotConverged { change: fine.im.abs() });
    }
    Ok(fine.re)
}
