use std::f64::consts::PI;

use crate::error::{Error, Result};

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// Maclaurin range. On the positive side the series cancels (Ai decays while
/// its two parts grow), so it stops earlier there.
const SERIES_LIMIT: f64 = 5.0;
const SERIES_LIMIT_POSITIVE: f64 = 2.5;
/// At and beyond this `|x|` the asymptotic expansion is accurate to rounding.
const ASYMPTOTIC_LIMIT: f64 = 10.0;

/// `(Ai(x), Ai'(x))` for `x ∈ [-20, 20]`.
pub fn airy(x: f64) -> Result<(f64, f64)> {
    if !(-20.0..=20.0).contains(&x) {
        return Err(Error::Domain(format!("airy argument {x} outside [-20, 20]")));
    }
    let ax = x.abs();
    if (-SERIES_LIMIT..=SERIES_LIMIT_POSITIVE).contains(&x) {
        return Ok(airy_series(x));
    }
    if ax >= ASYMPTOTIC_LIMIT {
        return Ok(airy_asymptotic(x));
    }
    // Bridge from the asymptotic anchor inwards: Ai is recessive towards +∞,
    // so integrating back from +10 is stable, and on the negative axis both
    // solutions oscillate.
    let x0 = ASYMPTOTIC_LIMIT.copysign(x);
    let (a, ap) = airy_asymptotic(x0);
    Ok(taylor_integrate(x0, a, ap, x))
}

/// Maclaurin series `Ai = c1 f − c2 g`.
pub fn airy_series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut fp) = (1.0, 0.0);
    let (mut g, mut gp) = (x, 1.0);
    // f terms: x^{3k} / prod (3j-1)(3j);  g terms: x^{3k+1} / prod (3j)(3j+1)
    let mut tf = 1.0;
    let mut tg = x;
    for k in 1..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        f += tf;
        g += tg;
        if x != 0.0 {
            fp += 3.0 * kf * tf / x;
            gp += (3.0 * kf + 1.0) * tg / x;
        }
        if tf.abs() < 1e-18 * f.abs().max(1.0) && tg.abs() < 1e-18 * g.abs().max(1.0) {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

fn u_coeffs(n: usize) -> Vec<f64> {
    let mut u = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let prev = u[k - 1];
        u.push(prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf));
    }
    u
}

/// Sum of `Σ (-1)^k c_k ζ^{-k}` over the selected parity, truncated at the
/// smallest term.
fn asym_sum(c: &[f64], zeta: f64, start: usize, step: usize, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut sign = 1.0;
    let mut k = start;
    while k < c.len() {
        let t = c[k] / zeta.powi(k as i32);
        if t.abs() > last {
            break;
        }
        sum += sign * t;
        last = t.abs();
        if last < 1e-18 * sum.abs() {
            break;
        }
        if alternate {
            sign = -sign;
        }
        k += step;
    }
    sum
}

/// Leading asymptotic expansions for large `|x|`.
pub fn airy_asymptotic(x: f64) -> (f64, f64) {
    let u = u_coeffs(40);
    let v: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(k, &uk)| {
            let kf = k as f64;
            -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk
        })
        .collect();
    let ax = x.abs();
    let zeta = 2.0 / 3.0 * ax.powf(1.5);
    let q = ax.powf(0.25);
    if x > 0.0 {
        let e = (-zeta).exp() / (2.0 * PI.sqrt());
        let su = asym_sum(&u, zeta, 0, 1, true);
        let sv = asym_sum(&v, zeta, 0, 1, true);
        (e / q * su, -e * q * sv)
    } else {
        let phase = zeta - PI / 4.0;
        let (s, c) = phase.sin_cos();
        let ue = asym_sum(&u, zeta, 0, 2, true);
        let uo = asym_sum(&u, zeta, 1, 2, true);
        let ve = asym_sum(&v, zeta, 0, 2, true);
        let vo = asym_sum(&v, zeta, 1, 2, true);
        let a = (c * ue + s * uo) / (PI.sqrt() * q);
        let ap = q / PI.sqrt() * (s * ve - c * vo);
        (a, ap)
    }
}

/// Integrates `y'' = x y` from `(x0, y0, y0')` to `x1` by local Taylor series.
fn taylor_integrate(x0: f64, y0: f64, yp0: f64, x1: f64) -> (f64, f64) {
    let steps = ((x1 - x0).abs() / 0.25).ceil().max(1.0) as usize;
    let h = (x1 - x0) / steps as f64;
    let (mut x, mut y, mut yp) = (x0, y0, yp0);
    for _ in 0..steps {
        let mut c = [0.0f64; 48];
        c[0] = y;
        c[1] = yp;
        for k in 0..46 {
            let prev = if k >= 1 { c[k - 1] } else { 0.0 };
            c[k + 2] = (x * c[k] + prev) / ((k as f64 + 1.0) * (k as f64 + 2.0));
        }
        let (mut ny, mut nyp) = (0.0, 0.0);
        for k in (0..48).rev() {
            ny = ny * h + c[k];
            if k >= 1 {
                nyp = nyp * h + k as f64 * c[k];
            }
        }
        x += h;
        y = ny;
        yp = nyp;
    }
    (y, yp)
}
