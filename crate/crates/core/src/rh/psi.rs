use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hm::HMSolution;
use super::jumps::psi_system;
use crate::error::{Error, Result};

type M2 = Matrix2<Complex64>;

const SERIES_TOL: f64 = 1e-10;
const MAX_TERMS: usize = 80;
const MIN_RADIUS: f64 = 4.0;
const MAX_RADIUS: f64 = 96.0;
pub const SECTOR_MARGIN: f64 = 0.05;
const DET_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiValue {
    pub zeta: Complex64,
    pub nu: f64,
    pub matrix: M2,
}

impl PsiValue {
    pub fn det(&self) -> Complex64 {
        self.matrix.determinant()
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn pauli() -> (M2, M2, M2) {
    let (o, z, i) = (c(1.0), c(0.0), Complex64::i());
    (
        M2::new(z, o, o, z),
        M2::new(z, -i, i, z),
        M2::new(o, z, z, -o),
    )
}

/// Coefficients of `A(ζ) = A₂ζ² + A₁ζ + A₀` in `Ψ′ = AΨ`, where
/// `A = −i(4ζ² + ν + 2q²)σ₃ + 4ζqσ₁ − 2q′σ₂`.
#[derive(Debug, Clone, Copy)]
struct LaxPair {
    nu: f64,
    a2: M2,
    a1: M2,
    a0: M2,
}

impl LaxPair {
    fn new(nu: f64, q: f64, qp: f64) -> Self {
        let (s1, s2, s3) = pauli();
        let i = Complex64::i();
        LaxPair {
            nu,
            a2: s3 * (-4.0 * i),
            a1: s1 * c(4.0 * q),
            a0: s3 * (-i * (nu + 2.0 * q * q)) - s2 * c(2.0 * qp),
        }
    }

    fn at(&self, z: Complex64) -> M2 {
        self.a2 * (z * z) + self.a1 * z + self.a0
    }

    fn theta(&self, z: Complex64) -> Complex64 {
        z * z * z * (4.0 / 3.0) + z * self.nu
    }
}

/// Off-diagonal `O` with `4i[O, σ₃] + R = 0`.
fn solve_offdiag(r: &M2) -> M2 {
    let i = Complex64::i();
    M2::new(c(0.0), -i * r[(0, 1)] / 8.0, i * r[(1, 0)] / 8.0, c(0.0))
}

/// Formal solution `Φ = Σ m_k ζ^{−k}` of `Φ′ = AΦ + iθ′Φσ₃`, `m₀ = I`.
/// Matching powers gives `4i[m_n, σ₃] + R_n = 0` with
/// `R_n = A₁m_{n−1} + A₀m_{n−2} + iν m_{n−2}σ₃ + (n−3)m_{n−3}`; the
/// off-diagonal part fixes the off-diagonal of `m_n`, and the diagonal part
/// of the equation at `n + 3` fixes the diagonal of `m_n`.
fn series_coeffs(lax: &LaxPair, count: usize) -> Vec<M2> {
    let (_, _, s3) = pauli();
    let i = Complex64::i();
    let zero = M2::zeros();
    let get = |m: &[M2], k: isize| if k < 0 { zero } else { m[k as usize] };
    let r_n = |m: &[M2], n: isize| {
        lax.a1 * get(m, n - 1) + lax.a0 * get(m, n - 2) + get(m, n - 2) * s3 * (i * lax.nu)
            + get(m, n - 3) * c((n - 3) as f64)
    };
    let mut m = vec![M2::identity()];
    m.push(solve_offdiag(&r_n(&m, 1)));
    for k in 1..count {
        // trial diagonals; D_{k+1} drops out of the diagonal equation at k+3
        let probe = |d: M2| {
            let mut t = m.clone();
            t[k] += d;
            let o1 = solve_offdiag(&r_n(&t, k as isize + 1));
            t.push(o1);
            let o2 = solve_offdiag(&r_n(&t, k as isize + 2));
            t.push(o2);
            let r = r_n(&t, k as isize + 3);
            [r[(0, 0)], r[(1, 1)]]
        };
        let f0 = probe(zero);
        let fa = probe(M2::new(c(1.0), c(0.0), c(0.0), c(0.0)));
        let fb = probe(M2::new(c(0.0), c(0.0), c(0.0), c(1.0)));
        let jac = M2::new(fa[0] - f0[0], fb[0] - f0[0], fa[1] - f0[1], fb[1] - f0[1]);
        let det = jac.determinant();
        let d1 = -(jac[(1, 1)] * f0[0] - jac[(0, 1)] * f0[1]) / det;
        let d2 = -(-jac[(1, 0)] * f0[0] + jac[(0, 0)] * f0[1]) / det;
        m[k][(0, 0)] = d1;
        m[k][(1, 1)] = d2;
        let next = solve_offdiag(&r_n(&m, k as isize + 1));
        m.push(next);
    }
    m.truncate(count);
    m
}

fn max_norm(m: &M2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Optimally truncated sum of the series at `z` and its error estimate.
fn series_sum(m: &[M2], z: Complex64) -> (M2, f64) {
    let inv = 1.0 / z;
    let mut sum = M2::zeros();
    let mut pow = c(1.0);
    let mut last = f64::INFINITY;
    for mk in m {
        let term = mk * pow;
        let size = max_norm(&term);
        if size > last {
            return (sum, last);
        }
        sum += term;
        last = size;
        if size < 1e-17 {
            return (sum, size);
        }
        pow *= inv;
    }
    (sum, last)
}

/// Taylor-series integration of `Ψ′ = AΨ` along the segment `z0 → z1`.
fn integrate_segment(lax: &LaxPair, z0: Complex64, z1: Complex64, mut psi: M2) -> M2 {
    let span = z1 - z0;
    if span.norm() == 0.0 {
        return psi;
    }
    let scale = |z: Complex64| {
        let a = max_norm(&lax.at(z));
        let b = max_norm(&(lax.a2 * (z * 2.0) + lax.a1));
        1.0f64.max(a).max(b.sqrt()).max(4f64.cbrt())
    };
    let hmax = 1.0 / scale(z0).max(scale(z1));
    let steps = (span.norm() / hmax).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    for s in 0..steps {
        let zc = z0 + h * s as f64;
        let b0 = lax.at(zc) * h;
        let b1 = (lax.a2 * (zc * 2.0) + lax.a1) * (h * h);
        let b2 = lax.a2 * (h * h * h);
        let mut t = [psi, M2::zeros(), M2::zeros()];
        let mut acc = psi;
        let base = max_norm(&psi);
        let mut small = 0;
        for k in 0..200 {
            let next = (b0 * t[0] + b1 * t[1] + b2 * t[2]) / c((k + 1) as f64);
            t = [next, t[0], t[1]];
            acc += next;
            if max_norm(&next) < 1e-18 * base {
                small += 1;
                if small == 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        psi = acc;
    }
    psi
}

/// Index into `psi_system().rays` of the ray preceding the sector; the four
/// sectors follow the rays at `π/6, 5π/6, 7π/6, 11π/6`.
pub fn sector_index(arg: f64) -> usize {
    psi_system().sector_of(arg)
}

/// Directions inside each sector where the exponent `θ` is real to leading order.
fn start_directions(sector: usize) -> &'static [f64] {
    match sector {
        0 => &[PI / 3.0, 2.0 * PI / 3.0],
        1 => &[PI],
        2 => &[4.0 * PI / 3.0, 5.0 * PI / 3.0],
        _ => &[0.0],
    }
}

/// Angle at radius `r` of the curve `Im θ = 0` that is asymptotic to the
/// direction `start`. On the real axis the curve is the axis itself.
fn real_exponent_angle(start: f64, nu: f64, r: f64) -> f64 {
    let s = (0.75 + 3.0 * nu / (16.0 * r * r)).clamp(0.0, 1.0);
    let base = s.sqrt().asin();
    let k = (start / (PI / 3.0)).round() as i32;
    match k {
        1 => base,
        2 => PI - base,
        4 => PI + base,
        5 => 2.0 * PI - base,
        _ => start,
    }
}

fn sector_contains(sector: usize, arg: f64) -> bool {
    let rays = psi_system().rays;
    let lo = rays[sector].angle;
    let width = (rays[(sector + 1) % 4].angle - lo).rem_euclid(2.0 * PI);
    (arg - lo).rem_euclid(2.0 * PI) <= width + 1e-12
        || (lo - arg).rem_euclid(2.0 * PI) < 1e-12
}

fn nearest_angle(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(2.0 * PI);
    if d > PI {
        from + d - 2.0 * PI
    } else {
        from + d
    }
}

fn lax_for(nu: f64, hm: &HMSolution) -> Result<LaxPair> {
    let (q, qp) = hm.eval(nu)?;
    Ok(LaxPair::new(nu, q, qp))
}

/// Ψ continued from the sector's asymptotics, starting on the direction
/// `start` (one of the sector's real-exponent directions). `zeta` may lie on
/// the sector's bounding rays.
pub fn psi_from(zeta: Complex64, nu: f64, hm: &HMSolution, sector: usize, start: f64) -> Result<PsiValue> {
    psi_from_radius(zeta, nu, hm, sector, start, MIN_RADIUS)
}

/// As [`psi_from`], with the smallest radius at which the series may be used.
pub fn psi_from_radius(
    zeta: Complex64,
    nu: f64,
    hm: &HMSolution,
    sector: usize,
    start: f64,
    min_radius: f64,
) -> Result<PsiValue> {
    if sector > 3 || !start_directions(sector).iter().any(|&s| (s - start).abs() < 1e-12) {
        return Err(Error::Invalid(format!("direction {start} is not a start direction of sector {sector}")));
    }
    let r = zeta.norm();
    let arg = if r == 0.0 { start } else { zeta.arg() };
    if r > 0.0 && !sector_contains(sector, arg) {
        return Err(Error::Invalid(format!("ζ = {zeta} is not in sector {sector}")));
    }
    let lax = lax_for(nu, hm)?;
    let coeffs = series_coeffs(&lax, MAX_TERMS);
    let mut radius = r.max(min_radius);
    let (z0, phi_at) = loop {
        let z0 = Complex64::from_polar(radius, real_exponent_angle(start, nu, radius));
        let (phi, err) = series_sum(&coeffs, z0);
        if err <= SERIES_TOL {
            break (z0, phi);
        }
        if radius >= MAX_RADIUS {
            return Err(Error::RadiusInsufficient { radius, error: err });
        }
        radius = (radius + 2.0).min(MAX_RADIUS);
    };
    let th = lax.theta(z0);
    let i = Complex64::i();
    let e = M2::new((-i * th).exp(), c(0.0), c(0.0), (i * th).exp());
    let mut psi = phi_at * e;
    // inward along Im θ = 0, where neither column dominates
    let legs = ((radius - r) / 0.05).ceil().max(1.0) as usize;
    let mut prev = z0;
    for k in 1..=legs {
        let rk = radius + (r - radius) * k as f64 / legs as f64;
        let next = Complex64::from_polar(rk, real_exponent_angle(start, nu, rk.max(1e-3)));
        psi = integrate_segment(&lax, prev, next, psi);
        prev = next;
    }
    if r > 0.0 {
        let from = prev.arg();
        let end = nearest_angle(from, arg);
        let arcs = (((end - from).abs() * r) / 0.05).ceil().max(1.0) as usize;
        for k in 1..=arcs {
            let a = from + (end - from) * k as f64 / arcs as f64;
            let next = Complex64::from_polar(r, a);
            psi = integrate_segment(&lax, prev, next, psi);
            prev = next;
        }
    }
    let dev = (psi.determinant() - 1.0).norm();
    if dev > DET_TOL {
        return Err(Error::NotConverged {
            residual: dev,
            iterations: 0,
            tol: DET_TOL,
        });
    }
    Ok(PsiValue { zeta, nu, matrix: psi })
}

/// Ψ(ζ; ν) off the jump contour.
pub fn psi_solve(zeta: Complex64, nu: f64, hm: &HMSolution) -> Result<PsiValue> {
    let sys = psi_system();
    if zeta.norm() > 0.0 {
        let arg = zeta.arg();
        if sys.distance_to_rays(arg) < SECTOR_MARGIN {
            return Err(Error::SectorBoundaryTooClose { angle: arg });
        }
    }
    let arg = if zeta.norm() > 0.0 { zeta.arg() } else { 0.0 };
    let sector = sector_index(arg);
    let start = start_directions(sector)
        .iter()
        .copied()
        .min_by(|a, b| {
            let da = (nearest_angle(arg, *a) - arg).abs();
            let db = (nearest_angle(arg, *b) - arg).abs();
            da.total_cmp(&db)
        })
        .expect("each sector has a start direction");
    psi_from(zeta, nu, hm, sector, start)
}

/// `2i ζ Ψ₁₂ e^{−iθ(ζ)}` at a real `ζ > 0`.
pub fn q_probe(r: f64, nu: f64, hm: &HMSolution) -> Result<Complex64> {
    let z = c(r);
    let psi = psi_solve(z, nu, hm)?;
    let th = lax_for(nu, hm)?.theta(z);
    Ok(Complex64::new(0.0, 2.0) * z * psi.matrix[(0, 1)] * (-Complex64::i() * th).exp())
}

/// The limit of `2i ζ Ψ₁₂ e^{−iθ}` as `ζ → +∞`, by polynomial extrapolation
/// in `1/ζ` from samples at `ζ = r₀, 2r₀, 4r₀, 8r₀`.
pub fn recover_q(nu: f64, hm: &HMSolution, r0: f64) -> Result<Complex64> {
    let xs: Vec<f64> = (0..4).map(|k| r0 * 2f64.powi(k)).collect();
    let mut p: Vec<Complex64> = xs.iter().map(|&r| q_probe(r, nu, hm)).collect::<Result<_>>()?;
    let h: Vec<f64> = xs.iter().map(|r| 1.0 / r).collect();
    // Neville at h = 0
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (p[i] * h[i + m] - p[i + 1] * h[i]) / (h[i + m] - h[i]);
        }
    }
    Ok(p[0])
}

/// `(1, −1)Ψ⁻¹(y)Ψ(x)(1, 1)ᵀ`, optionally with the adjugate in place of the inverse.
pub fn kpii_numerator(x: f64, y: f64, nu: f64, hm: &HMSolution, adjugate: bool) -> Result<Complex64> {
    let px = psi_solve(c(x), nu, hm)?.matrix;
    let py = psi_solve(c(y), nu, hm)?.matrix;
    let inv = if adjugate {
        M2::new(py[(1, 1)], -py[(0, 1)], -py[(1, 0)], py[(0, 0)])
    } else {
        py.try_inverse().ok_or(Error::Invalid("singular Ψ".into()))?
    };
    let v = inv * px;
    Ok(v[(0, 0)] + v[(0, 1)] - v[(1, 0)] - v[(1, 1)])
}

/// `K(x, y) = (1, −1)Ψ⁻¹(y)Ψ(x)(1, 1)ᵀ / (2πi(x − y))`; the diagonal is taken
/// as a symmetric difference quotient of the numerator.
pub fn kpii_kernel(x: f64, y: f64, nu: f64, hm: &HMSolution) -> Result<f64> {
    let num = |x: f64, y: f64| kpii_numerator(x, y, nu, hm, false);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let k = if x == y {
        let eps = 1e-4;
        (num(x + eps, x)? - num(x - eps, x)?) / (2.0 * eps) / two_pi_i
    } else {
        num(x, y)? / (two_pi_i * (x - y))
    };
    if k.im.abs() > 1e-6 * (1.0 + k.re.abs()) {
        return Err(Error::NotConverged {
            residual: k.im.abs(),
            iterations: 0,
            tol: 1e-6,
        });
    }
    Ok(k.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rh::hm::hastings_mcleod;

    #[test]
    fn series_first_coefficient_carries_q() {
        let lax = LaxPair::new(0.3, 0.25, -0.2);
        let m = series_coeffs(&lax, 12);
        let q = Complex64::new(0.0, 2.0) * m[1][(0, 1)];
        assert!((q - 0.25).norm() < 1e-14);
        // the formal series satisfies the ODE: check the residual at a large point
        let z = Complex64::from_polar(9.0, 0.4);
        let h = 1e-5;
        let (phi, _) = series_sum(&m, z);
        let (pp, _) = series_sum(&m, z + h);
        let (pm, _) = series_sum(&m, z - h);
        let dphi = (pp - pm) / c(2.0 * h);
        let (_, _, s3) = pauli();
        let th1 = z * z * 4.0 + 0.3;
        let res = dphi - lax.at(z) * phi - phi * s3 * (Complex64::i() * th1);
        assert!(max_norm(&res) < 1e-6, "{}", max_norm(&res));
    }

    #[test]
    fn det_and_jump() {
        let hm = hastings_mcleod(-8.0, 6.0, 0.05).unwrap();
        let p = psi_solve(Complex64::from_polar(2.0, PI / 3.0), 0.0, &hm).unwrap();
        assert!((p.det() - 1.0).norm() < 1e-8);
        let z = Complex64::from_polar(1.5, 5.0 * PI / 6.0);
        let minus = psi_from(z, 0.0, &hm, 0, 2.0 * PI / 3.0).unwrap().matrix;
        let plus = psi_from(z, 0.0, &hm, 1, PI).unwrap().matrix;
        let j = psi_system().jump_complex(1);
        let j = M2::new(j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)]);
        assert!(max_norm(&(plus - minus * j)) < 1e-6, "{}", max_norm(&(plus - minus * j)));
    }
}
