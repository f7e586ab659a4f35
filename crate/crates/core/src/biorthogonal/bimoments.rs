use astro_float::BigFloat;
use rayon::prelude::*;
use serde::Serialize;

use super::hp::{to_f64, Hp};
use crate::error::{Error, Result};
use crate::model::PotentialPair;

pub const MAX_SIZE: usize = 48;
pub const DEFAULT_BITS: usize = 256;
/// ln(1e30): the integrand at the edge of the square is below 1e−30 of its maximum.
const TRUNCATION_LOG: f64 = 69.077_552_789_821_37;
/// Relative agreement of successive node counts that stops the refinement.
const NODE_TOL: f64 = 1e-28;
const MAX_NODES: usize = 8192;
const PANEL_WIDTH: f64 = 2.0;
const PANEL_ORDER: usize = 24;

/// `B_jk = ∬ x^j y^k exp(−n(V(x) + W(y) − τxy)) dx dy`.
#[derive(Debug, Clone, Serialize)]
pub struct BimomentMatrix {
    pub size: usize,
    pub n_scale: usize,
    /// Row-major, rounded to double precision.
    pub entries: Vec<f64>,
    pub precision_bits: usize,
    pub pp: PotentialPair,
    /// Half-width of the integration square.
    pub half_width: f64,
    /// Composite Gauss–Legendre nodes per axis.
    pub nodes: usize,
    #[serde(skip)]
    pub(crate) big: Vec<BigFloat>,
    /// `∬ |x|^j |y|^k w`, the scale against which entries are judged.
    #[serde(skip)]
    pub(crate) abs: Vec<f64>,
}

impl BimomentMatrix {
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.size + k]
    }

    pub fn is_even_weight(&self) -> bool {
        self.pp.v.is_even() && self.pp.w.is_even()
    }
}

/// Log of the weight, `−n(λV(x) + W(y) − τxy)`.
pub(crate) fn log_weight(pp: &PotentialPair, n: usize, x: f64, y: f64) -> f64 {
    -(n as f64) * (pp.scale * pp.v.eval(x) + pp.w.eval(y) - pp.tau * x * y)
}

pub(crate) fn check_weight(pp: &PotentialPair) -> Result<()> {
    let (dv, dw) = (pp.v.degree(), pp.w.degree());
    let ok_deg = |d: usize, lead: f64| d >= 2 && d % 2 == 0 && lead > 0.0;
    if !ok_deg(dv, pp.scale * pp.v.leading()) || !ok_deg(dw, pp.w.leading()) {
        return Err(Error::NonConfiningWeight(format!(
            "V and W need even degree ≥ 2 and positive leading coefficients (V = {}, W = {})",
            pp.v, pp.w
        )));
    }
    if dv == 2 && dw == 2 {
        let (a, b) = (pp.scale * pp.v.leading(), pp.w.leading());
        if 4.0 * a * b <= pp.tau * pp.tau {
            return Err(Error::NonConfiningWeight(format!(
                "quadratic form {a}x² + {b}y² − {}xy is not positive definite",
                pp.tau
            )));
        }
    }
    Ok(())
}

/// Half-width `L` of the integration square: `1.5·max(L₀, 8/n^{1/4})` where
/// `L₀` is where the integrand (with the largest monomial factor) drops below
/// 1e−30 of its maximum on the boundary.
pub(crate) fn truncation(pp: &PotentialPair, n: usize, size: usize) -> f64 {
    let deg = (size.max(1) - 1) as f64;
    let psi = |x: f64, y: f64| log_weight(pp, n, x, y) + deg * ((1.0 + x.abs()).ln() + (1.0 + y.abs()).ln());
    let boundary_max = |l: f64| {
        let m = 200;
        (0..=m)
            .map(|i| {
                let t = -l + 2.0 * l * i as f64 / m as f64;
                psi(l, t).max(psi(-l, t)).max(psi(t, l)).max(psi(t, -l))
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let interior_max = |l: f64| {
        let m = 200;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=m {
            for j in 0..=m {
                let x = -l + 2.0 * l * i as f64 / m as f64;
                let y = -l + 2.0 * l * j as f64 / m as f64;
                best = best.max(psi(x, y));
            }
        }
        best
    };
    let mut outer = 2.0;
    while boundary_max(outer) > interior_max(outer) - TRUNCATION_LOG && outer < 1e3 {
        outer *= 1.5;
    }
    let peak = interior_max(outer);
    // smallest L with the boundary below threshold, by bisection
    let (mut lo, mut hi) = (0.0, outer);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if boundary_max(mid) > peak - TRUNCATION_LOG {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    1.5 * hi.max(8.0 / (n as f64).powf(0.25))
}

struct Raw {
    big: Vec<BigFloat>,
    abs: Vec<f64>,
}

/// Panel layout of the composite tensor rule on `[−L, L]²`.
#[derive(Debug, Clone, Copy)]
struct Layout {
    half_width: f64,
    panels: usize,
    order: usize,
}

impl Layout {
    fn width(&self) -> f64 {
        2.0 * self.half_width / self.panels as f64
    }

    /// Panel centres, mirrored exactly so the nodes are symmetric about 0.
    fn centre(&self, p: usize) -> f64 {
        let q = self.panels - 1 - p;
        if p < q {
            -self.centre(q)
        } else {
            -self.half_width + self.width() * (p as f64 + 0.5)
        }
    }
}

/// Panel pairs whose integrand (with the largest monomial factor) stays below
/// the working precision relative to the peak, sampled on a 9×9 grid with a
/// safety margin, are dropped. Dropping anything larger would break the
/// product structure of the rule that small pivots at weak coupling rely on.
fn kept_blocks(pp: &PotentialPair, n: usize, size: usize, bits: usize, lay: Layout) -> Vec<Vec<bool>> {
    let deg = (size.max(1) - 1) as f64;
    let psi = |x: f64, y: f64| log_weight(pp, n, x, y) + deg * ((1.0 + x.abs()).ln() + (1.0 + y.abs()).ln());
    let h = lay.width();
    let s = 9;
    let block_max: Vec<Vec<f64>> = (0..lay.panels)
        .map(|p| {
            (0..lay.panels)
                .map(|q| {
                    let mut best = f64::NEG_INFINITY;
                    for i in 0..s {
                        for j in 0..s {
                            let x = lay.centre(p) + h * (i as f64 / (s - 1) as f64 - 0.5);
                            let y = lay.centre(q) + h * (j as f64 / (s - 1) as f64 - 0.5);
                            best = best.max(psi(x, y));
                        }
                    }
                    best
                })
                .collect()
        })
        .collect();
    let peak = block_max.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = TRUNCATION_LOG.max(bits as f64 * std::f64::consts::LN_2) + 25.0;
    block_max
        .iter()
        .map(|row| row.iter().map(|&m| m >= peak - cut).collect())
        .collect()
}

fn tensor_moments(pp: &PotentialPair, n: usize, size: usize, bits: usize, lay: Layout) -> Raw {
    let hp = Hp::new(bits);
    let (t, w) = hp.gauss_legendre(lay.order);
    let m = lay.order;
    let half_h = hp.from_f64(0.5 * lay.width());
    let nodes: Vec<(BigFloat, BigFloat)> = (0..lay.panels)
        .flat_map(|p| {
            let c = hp.from_f64(lay.centre(p));
            t.iter()
                .zip(&w)
                .map(|(ti, wi)| (hp.add(&c, &hp.mul(&half_h, ti)), hp.mul(&half_h, wi)))
                .collect::<Vec<_>>()
        })
        .collect();
    let kept = kept_blocks(pp, n, size, bits, lay);
    let nf = hp.from_usize(n);
    let kappa = hp.mul(&nf, &hp.from_f64(pp.tau));
    let side = |p: &crate::model::Polynomial| -> Vec<BigFloat> {
        let mut h = Hp::new(bits);
        nodes
            .iter()
            .map(|(x, wt)| {
                let e = h.exp(&h.mul(&nf, &h.poly(p, x)).neg());
                h.mul(wt, &e)
            })
            .collect()
    };
    let a = side(&pp.v.scale(pp.scale));
    let b = side(&pp.w);
    let c0 = hp.from_f64(lay.centre(0));
    let hw = hp.from_f64(lay.width());
    let ys: Vec<f64> = nodes.iter().map(|(y, _)| to_f64(y)).collect();
    let rows: Vec<(Vec<BigFloat>, Vec<f64>)> = (0..nodes.len())
        .into_par_iter()
        .map_init(
            || Hp::new(bits),
            |h, i| {
                let x = &nodes[i].0;
                let p = i / m;
                // exp(κ x y) = exp(κ x c_q) · exp(κ x (y − c_q)), with c_q = c_0 + q·width
                let kx = h.mul(&kappa, x);
                let step = h.exp(&h.mul(&kx, &hw));
                let mut centre_factor = h.exp(&h.mul(&kx, &c0));
                let local: Vec<BigFloat> = t.iter().map(|ti| h.exp(&h.mul(&kx, &h.mul(&half_h, ti)))).collect();
                let mut acc = vec![h.zero(); size];
                let mut acc_abs = vec![0.0; size];
                for q in 0..lay.panels {
                    if kept[p][q] {
                        let row = h.mul(&a[i], &centre_factor);
                        for r in 0..m {
                            let l = q * m + r;
                            let y = &nodes[l].0;
                            let c = h.mul(&h.mul(&row, &b[l]), &local[r]);
                            let cf = to_f64(&c);
                            let mut pw = c;
                            let mut pa = cf;
                            for k in 0..size {
                                acc[k] = h.add(&acc[k], &pw);
                                acc_abs[k] += pa;
                                if k + 1 < size {
                                    pw = h.mul(&pw, y);
                                    pa *= ys[l].abs();
                                }
                            }
                        }
                    }
                    centre_factor = h.mul(&centre_factor, &step);
                }
                (acc, acc_abs)
            },
        )
        .collect();
    let mut big = vec![hp.zero(); size * size];
    let mut abs = vec![0.0; size * size];
    for (i, (t, ta)) in rows.iter().enumerate() {
        let x = &nodes[i].0;
        let xa = ys[i].abs();
        let mut pw = hp.one();
        let mut pa = 1.0;
        for j in 0..size {
            for k in 0..size {
                big[j * size + k] = hp.add(&big[j * size + k], &hp.mul(&pw, &t[k]));
                abs[j * size + k] += pa * ta[k];
            }
            pw = hp.mul(&pw, x);
            pa *= xa;
        }
    }
    Raw { big, abs }
}

pub fn bimoments(pp: &PotentialPair, n_scale: usize, size: usize) -> Result<BimomentMatrix> {
    bimoments_with_precision(pp, n_scale, size, DEFAULT_BITS)
}

/// Bimoments by a composite tensor Gauss–Legendre rule at `bits` of working
/// precision. The rule is accepted when raising the per-panel order by half
/// changes no entry by more than 1e−28 of its absolute scale; otherwise the
/// panels are halved.
pub fn bimoments_with_precision(pp: &PotentialPair, n_scale: usize, size: usize, bits: usize) -> Result<BimomentMatrix> {
    if size > MAX_SIZE {
        return Err(Error::SizeTooLarge { size, max: MAX_SIZE });
    }
    if size == 0 || n_scale == 0 {
        return Err(Error::Invalid("size and n_scale must be positive".into()));
    }
    check_weight(pp)?;
    let l = truncation(pp, n_scale, size);
    let mut lay = Layout {
        half_width: l,
        panels: ((2.0 * l / PANEL_WIDTH).ceil() as usize).max(4),
        order: PANEL_ORDER,
    };
    let hp = Hp::new(bits);
    let accepted = loop {
        let coarse = tensor_moments(pp, n_scale, size, bits, lay);
        let fine_lay = Layout {
            order: lay.order + lay.order / 2,
            ..lay
        };
        let fine = tensor_moments(pp, n_scale, size, bits, fine_lay);
        let change = coarse
            .big
            .iter()
            .zip(&fine.big)
            .zip(&fine.abs)
            .map(|((a, b), s)| if *s > 0.0 { to_f64(&hp.sub(a, b)).abs() / s } else { 0.0 })
            .fold(0.0, f64::max);
        if change <= NODE_TOL {
            break (fine, fine_lay);
        }
        if 2 * lay.panels * fine_lay.order > MAX_NODES {
            return Err(Error::QuadratureNotConverged { change });
        }
        lay.panels *= 2;
    };
    let (raw, lay) = accepted;
    let mut big = raw.big;
    let even = pp.v.is_even() && pp.w.is_even();
    if even {
        for j in 0..size {
            for k in 0..size {
                if (j + k) % 2 == 1 {
                    big[j * size + k] = hp.zero();
                }
            }
        }
    }
    Ok(BimomentMatrix {
        size,
        n_scale,
        entries: big.iter().map(to_f64).collect(),
        precision_bits: bits,
        pp: pp.clone(),
        half_width: l,
        nodes: lay.panels * lay.order,
        big,
        abs: raw.abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Polynomial;
    use std::f64::consts::PI;

    fn gaussian_pair(tau: f64) -> PotentialPair {
        let h = Polynomial::new(vec![0.0, 0.0, 0.5]);
        PotentialPair::new(h.clone(), h, tau).unwrap()
    }

    #[test]
    fn factorized_gaussian_moments() {
        let b = bimoments_with_precision(&gaussian_pair(0.0), 1, 5, 128).unwrap();
        // Gaussian moments m_0 = √(2π), m_2 = √(2π), m_4 = 3√(2π)
        let m = |k: usize| match k {
            0 | 2 => (2.0 * PI).sqrt(),
            4 => 3.0 * (2.0 * PI).sqrt(),
            _ => 0.0,
        };
        assert!((b.get(0, 0) - 2.0 * PI).abs() < 1e-13);
        for j in 0..5 {
            for k in 0..5 {
                assert!((b.get(j, k) - m(j) * m(k)).abs() < 1e-12, "{j} {k}");
            }
        }
        assert_eq!(b.get(0, 1), 0.0);
    }

    #[test]
    fn coupled_gaussian_closed_form() {
        // ∬ exp(−x²/2 − y²/2 + τxy) = 2π/√(1−τ²)
        let tau = 0.5;
        let b = bimoments_with_precision(&gaussian_pair(tau), 1, 3, 128).unwrap();
        let z = 2.0 * PI / (1.0 - tau * tau).sqrt();
        assert!((b.get(0, 0) / z - 1.0).abs() < 1e-14);
        // E[xy] = τ/(1−τ²)
        assert!((b.get(1, 1) / z - tau / (1.0 - tau * tau)).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            bimoments(&gaussian_pair(0.5), 1, 49),
            Err(Error::SizeTooLarge { .. })
        ));
        assert!(matches!(
            bimoments(&gaussian_pair(1.0), 1, 3),
            Err(Error::NonConfiningWeight(_))
        ));
    }
}
