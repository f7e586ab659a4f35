//! Thin helpers over `astro_float::BigFloat` at a fixed working precision.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use crate::model::{Polynomial, QuadratureRule};

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug)]
pub struct Hp {
    pub bits: usize,
    cc: Consts,
}

impl Clone for Hp {
    fn clone(&self) -> Self {
        Hp::new(self.bits)
    }
}

impl Hp {
    pub fn new(bits: usize) -> Self {
        Hp {
            bits,
            cc: Consts::new().expect("constant cache allocation"),
        }
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn from_usize(&self, k: usize) -> BigFloat {
        BigFloat::from_u64(k as u64, self.bits)
    }

    pub fn zero(&self) -> BigFloat {
        self.from_f64(0.0)
    }

    pub fn one(&self) -> BigFloat {
        self.from_f64(1.0)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn recip(&self, a: &BigFloat) -> BigFloat {
        a.reciprocal(self.bits, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }

    /// Horner evaluation with the coefficients taken exactly from `p`.
    pub fn poly(&self, p: &Polynomial, x: &BigFloat) -> BigFloat {
        let mut acc = self.zero();
        for &c in p.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.from_f64(c));
        }
        acc
    }

    /// Gauss–Legendre rule on `[-1, 1]` with nodes and weights refined to the
    /// working precision by Newton steps from the double-precision rule.
    pub fn gauss_legendre(&self, n: usize) -> (Vec<BigFloat>, Vec<BigFloat>) {
        let seed = QuadratureRule::gauss_legendre(n);
        let mut nodes = vec![self.zero(); n];
        let mut weights = vec![self.zero(); n];
        let tol_exp = -(self.bits as i32) + 4;
        for i in n / 2..n {
            let mut x = self.from_f64(seed.nodes[i]);
            let mut dp = self.one();
            for _ in 0..12 {
                let (p, d) = self.legendre(n, &x);
                dp = d;
                let dx = self.div(&p, &dp);
                x = self.sub(&x, &dx);
                if dx.is_zero() || dx.exponent().is_some_and(|e| e < tol_exp) {
                    let (_, d) = self.legendre(n, &x);
                    dp = d;
                    break;
                }
            }
            let one_minus = self.sub(&self.one(), &self.mul(&x, &x));
            let w = self.div(&self.from_f64(2.0), &self.mul(&one_minus, &self.mul(&dp, &dp)));
            nodes[n - 1 - i] = x.neg();
            weights[n - 1 - i] = w.clone();
            nodes[i] = x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = self.zero();
        }
        (nodes, weights)
    }

    fn legendre(&self, n: usize, x: &BigFloat) -> (BigFloat, BigFloat) {
        let mut p0 = self.one();
        let mut p1 = x.clone();
        for k in 2..=n {
            let a = self.mul(&self.mul(&self.from_usize(2 * k - 1), x), &p1);
            let b = self.mul(&self.from_usize(k - 1), &p0);
            let p2 = self.div(&self.sub(&a, &b), &self.from_usize(k));
            p0 = p1;
            p1 = p2;
        }
        let num = self.mul(&self.from_usize(n), &self.sub(&self.mul(x, &p1), &p0));
        let den = self.sub(&self.mul(x, x), &self.one());
        (p1, self.div(&num, &den))
    }
}

/// Nearest double (truncation of the mantissa beyond 128 bits is immaterial).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((m, _, s, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    if m.iter().all(|&w| w == 0) {
        return 0.0;
    }
    // value = 0.m × 2^e with the top word most significant
    let top = m[m.len() - 1] as f64;
    let next = if m.len() > 1 { m[m.len() - 2] as f64 } else { 0.0 };
    let frac = (top + next * 2f64.powi(-64)) * 2f64.powi(-64);
    let v = scale_pow2(frac, e);
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

fn scale_pow2(mut v: f64, mut e: i32) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e)
}
