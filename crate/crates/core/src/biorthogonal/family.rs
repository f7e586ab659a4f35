use astro_float::BigFloat;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bimoments::{log_weight, BimomentMatrix};
use super::hp::{to_f64, Hp};
use crate::error::{Error, Result};
use crate::model::quadrature::composite_gauss;
use crate::model::{Polynomial, PotentialPair};

/// Monic `p_k`, `q_k` with `∬ p_j q_k w = h²_k δ_jk`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiorthogonalFamily {
    #[serde(rename = "p")]
    pub p_coeffs: Vec<Polynomial>,
    #[serde(rename = "q")]
    pub q_coeffs: Vec<Polynomial>,
    pub h_sq: Vec<f64>,
    pub n_scale: usize,
    pub size: usize,
    #[serde(skip)]
    pub pp: Option<PotentialPair>,
    #[serde(skip)]
    pub half_width: f64,
    /// Largest `|∬ p_j q_k w − h²_k δ_jk| / (h_j h_k)` found by re-integration.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub all_real: bool,
    pub simple: bool,
    pub interlacing: bool,
    pub max_imag: f64,
}

/// LDU of the bimoment matrix at its working precision: rows of `L⁻¹` are the
/// coefficients of `p_k`, columns of `U⁻¹` those of `q_k`, pivots are `h²_k`.
pub fn biorthogonal_family(b: &BimomentMatrix) -> Result<BiorthogonalFamily> {
    let k = b.size;
    let hp = Hp::new(b.precision_bits);
    let mut a: Vec<BigFloat> = b.big.clone();
    let mut lower = vec![hp.zero(); k * k];
    let mut upper = vec![hp.zero(); k * k];
    let mut d = Vec::with_capacity(k);
    let tiny = 2f64.powi(-(b.precision_bits as i32) + 16);
    for s in 0..k {
        let piv = a[s * k + s].clone();
        let pf = to_f64(&piv);
        if piv.is_zero() || pf.abs() <= tiny * b.abs[s * k + s] {
            return Err(Error::SingularMinor {
                index: s,
                bits: b.precision_bits,
            });
        }
        lower[s * k + s] = hp.one();
        upper[s * k + s] = hp.one();
        for i in (s + 1)..k {
            lower[i * k + s] = hp.div(&a[i * k + s], &piv);
            upper[s * k + i] = hp.div(&a[s * k + i], &piv);
        }
        for i in (s + 1)..k {
            for j in (s + 1)..k {
                let corr = hp.mul(&lower[i * k + s], &a[s * k + j]);
                a[i * k + j] = hp.sub(&a[i * k + j], &corr);
            }
        }
        d.push(piv);
    }
    // P = L⁻¹ (unit lower), R = U⁻¹ (unit upper)
    let mut p = vec![hp.zero(); k * k];
    let mut r = vec![hp.zero(); k * k];
    for i in 0..k {
        p[i * k + i] = hp.one();
        r[i * k + i] = hp.one();
        for j in (0..i).rev() {
            // (P L)_{ij} = 0: P_ij = −Σ_{m=j+1..i} P_im L_mj
            let mut s = hp.zero();
            for m in (j + 1)..=i {
                s = hp.add(&s, &hp.mul(&p[i * k + m], &lower[m * k + j]));
            }
            p[i * k + j] = s.neg();
            // (U R)_{ji} = 0: R_ji = −Σ_{m=j+1..i} U_jm R_mi
            let mut s = hp.zero();
            for m in (j + 1)..=i {
                s = hp.add(&s, &hp.mul(&upper[j * k + m], &r[m * k + i]));
            }
            r[j * k + i] = s.neg();
        }
    }
    let even = b.is_even_weight();
    let clean = |c: f64, deg: usize, m: usize| if even && (deg + m) % 2 == 1 { 0.0 } else { c };
    let p_coeffs: Vec<Polynomial> = (0..k)
        .map(|i| Polynomial::new((0..=i).map(|m| clean(to_f64(&p[i * k + m]), i, m)).collect()))
        .collect();
    let q_coeffs: Vec<Polynomial> = (0..k)
        .map(|i| Polynomial::new((0..=i).map(|m| clean(to_f64(&r[m * k + i]), i, m)).collect()))
        .collect();
    let mut fam = BiorthogonalFamily {
        p_coeffs,
        q_coeffs,
        h_sq: d.iter().map(to_f64).collect(),
        n_scale: b.n_scale,
        size: k,
        pp: Some(b.pp.clone()),
        half_width: b.half_width,
        residual: f64::NAN,
    };
    fam.residual = fam.biorthogonality_residual(0.25, 20);
    Ok(fam)
}

impl BiorthogonalFamily {
    pub fn p(&self, k: usize, x: f64) -> f64 {
        self.p_coeffs[k].eval(x)
    }

    pub fn q(&self, k: usize, y: f64) -> f64 {
        self.q_coeffs[k].eval(y)
    }

    /// Pairings `∬ p_j q_k w` by an independent double-precision composite
    /// tensor rule with panels of width `panel` and `order` nodes each.
    pub fn pairings(&self, panel: f64, order: usize) -> DMatrix<f64> {
        let pp = self.pp.as_ref().expect("family built from bimoments");
        let n = self.n_scale;
        let panels = (2.0 * self.half_width / panel).ceil() as usize;
        let rule = composite_gauss(-self.half_width, self.half_width, panels, order);
        let xs = &rule.nodes;
        let mut shift = f64::NEG_INFINITY;
        for &x in xs {
            for &y in xs {
                shift = shift.max(log_weight(pp, n, x, y));
            }
        }
        let k = self.size;
        let pv = DMatrix::from_fn(k, xs.len(), |j, i| self.p(j, xs[i]));
        let qv = DMatrix::from_fn(k, xs.len(), |j, i| self.q(j, xs[i]));
        let f = DMatrix::from_fn(xs.len(), xs.len(), |i, l| {
            rule.weights[i] * rule.weights[l] * (log_weight(pp, n, xs[i], xs[l]) - shift).exp()
        });
        (&pv * f * qv.transpose()) * shift.exp()
    }

    pub fn biorthogonality_residual(&self, panel: f64, order: usize) -> f64 {
        let g = self.pairings(panel, order);
        let mut worst: f64 = 0.0;
        for j in 0..self.size {
            for k in 0..self.size {
                let target = if j == k { self.h_sq[k] } else { 0.0 };
                let scale = (self.h_sq[j] * self.h_sq[k]).abs().sqrt();
                worst = worst.max((g[(j, k)] - target).abs() / scale);
            }
        }
        worst
    }

    /// Zeros of `p_k` from the companion matrix, with one Newton polish each.
    pub fn p_zeros(&self, k: usize) -> Vec<Complex64> {
        self.p_coeffs[k].roots()
    }

    pub fn check_zeros(&self) -> ZeroReport {
        let mut rep = ZeroReport {
            all_real: true,
            simple: true,
            interlacing: true,
            max_imag: 0.0,
        };
        let mut prev: Option<Vec<f64>> = None;
        for k in 1..self.size {
            let z = self.p_zeros(k);
            let scale = z.iter().map(|c| c.norm()).fold(1.0, f64::max);
            let imag = z.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
            rep.max_imag = rep.max_imag.max(imag / scale);
            if imag > 1e-8 * scale {
                rep.all_real = false;
            }
            let mut re: Vec<f64> = z.iter().map(|c| c.re).collect();
            re.sort_by(|a, b| a.total_cmp(b));
            if re.windows(2).any(|w| w[1] - w[0] <= 1e-9 * scale) {
                rep.simple = false;
            }
            if let Some(pz) = &prev {
                if !interlace(pz, &re, 1e-9 * scale) {
                    rep.interlacing = false;
                }
            }
            prev = Some(re);
        }
        rep
    }
}

/// `inner` (k zeros) strictly separates `outer` (k+1 zeros).
pub fn interlace(inner: &[f64], outer: &[f64], tol: f64) -> bool {
    outer.len() == inner.len() + 1
        && inner
            .iter()
            .enumerate()
            .all(|(i, &z)| outer[i] < z - tol && z + tol < outer[i + 1])
}
