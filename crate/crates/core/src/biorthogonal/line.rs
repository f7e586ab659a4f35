use crate::error::{Error, Result};
use crate::model::quadrature::composite_gauss;
use crate::model::{Polynomial, PotentialPair};

/// Log-weight drop (below the peak) that delimits the integration window.
const WINDOW_LOG: f64 = 80.0;
const PANEL_ORDER: usize = 20;
const MAX_PANELS: usize = 4096;

/// Window `[a, b]` outside of which `φ(t) + deg·ln(1 + |t|)` stays more than
/// `WINDOW_LOG` below its peak; also returns the peak of `φ`.
pub(crate) fn window<F: Fn(f64) -> f64>(phi: &F, deg: usize) -> (f64, f64, f64) {
    let psi = |t: f64| phi(t) + deg as f64 * (1.0 + t.abs()).ln();
    let m = 2000;
    let mut r: f64 = 1.0;
    loop {
        let grid: Vec<f64> = (0..=m).map(|i| -r + 2.0 * r * i as f64 / m as f64).collect();
        let peak = grid.iter().map(|&t| psi(t)).fold(f64::NEG_INFINITY, f64::max);
        if psi(r).max(psi(-r)) < peak - WINDOW_LOG || r > 1e4 {
            let keep: Vec<&f64> = grid.iter().filter(|&&t| psi(t) >= peak - WINDOW_LOG).collect();
            let step = 2.0 * r / m as f64;
            let a = (*keep[0] - step).max(-r);
            let b = (*keep[keep.len() - 1] + step).min(r);
            let phi_peak = grid.iter().map(|&t| phi(t)).fold(f64::NEG_INFINITY, f64::max);
            return (a, b, phi_peak);
        }
        r *= 2.0;
    }
}

/// `∫ f_m(t) e^{φ(t)} dt` for all components `m` of `f` (polynomial growth of
/// degree ≤ `deg`), by composite Gauss–Legendre on the window, doubling the
/// panels until every component changes by at most `tol` of its absolute scale.
/// Results are returned as `(values, log_scale)` with true value `values·e^{log_scale}`.
pub(crate) fn line_integrals<F, G>(phi: F, deg: usize, comps: usize, f: G, tol: f64) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64) -> f64,
    G: Fn(f64, &mut [f64]),
{
    let (a, b, peak) = window(&phi, deg);
    let mut buf = vec![0.0; comps];
    let eval = |panels: usize, buf: &mut [f64]| {
        let rule = composite_gauss(a, b, panels, PANEL_ORDER);
        let mut acc = vec![0.0; comps];
        let mut abs = vec![0.0; comps];
        for (t, w) in rule.iter() {
            let e = w * (phi(t) - peak).exp();
            f(t, buf);
            for m in 0..comps {
                acc[m] += e * buf[m];
                abs[m] += e * buf[m].abs();
            }
        }
        (acc, abs)
    };
    let mut panels = 8;
    let (mut prev, _) = eval(panels, &mut buf);
    loop {
        panels *= 2;
        let (next, abs) = eval(panels, &mut buf);
        let change = prev
            .iter()
            .zip(&next)
            .zip(&abs)
            .map(|((p, q), s)| if *s > 0.0 { (p - q).abs() / s } else { 0.0 })
            .fold(0.0, f64::max);
        if change <= tol {
            return Ok((next, peak));
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged { change });
        }
        prev = next;
    }
}

/// `w_j(x) = ∫ y^j exp(−n(W(y) + λV(x) − τxy)) dy`.
pub fn w_function(x: f64, j: usize, pp: &PotentialPair, n_scale: usize) -> Result<f64> {
    let n = n_scale as f64;
    let (v, s) = line_integrals(
        |y| -n * (pp.w.eval(y) - pp.tau * x * y),
        j,
        1,
        |y, out| out[0] = y.powi(j as i32),
        1e-13,
    )?;
    Ok(v[0] * (s - n * pp.scale * pp.v.eval(x)).exp())
}

/// `∫ P(t) e^{−n U(t)} dt` for each polynomial in `polys`, with `e^{shift}`
/// folded into the result.
pub(crate) fn transformed(
    polys: &[Polynomial],
    u: &Polynomial,
    cross: f64,
    n: f64,
    shift: f64,
) -> Result<Vec<f64>> {
    let deg = polys.iter().map(|p| p.degree()).max().unwrap_or(0);
    let (v, s) = line_integrals(
        |t| -n * (u.eval(t) - cross * t),
        deg,
        polys.len(),
        |t, out| {
            for (o, p) in out.iter_mut().zip(polys) {
                *o = p.eval(t);
            }
        },
        1e-13,
    )?;
    let f = (s + shift).exp();
    Ok(v.iter().map(|x| x * f).collect())
}
