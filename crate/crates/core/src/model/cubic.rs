use std::f64::consts::PI;

use num_complex::Complex64;

/// Relative size of the discriminant below which roots are treated as repeated.
const DISCRIMINANT_TOL: f64 = 1e-13;

fn polish(a3: f64, a1: f64, a0: f64, s: f64) -> f64 {
    let f = a3 * s * s * s + a1 * s + a0;
    let df = 3.0 * a3 * s * s + a1;
    if df == 0.0 || !df.is_finite() {
        return s;
    }
    let next = s - f / df;
    let fn_ = a3 * next * next * next + a1 * next + a0;
    if fn_.abs() <= f.abs() {
        next
    } else {
        s
    }
}

/// Real roots of `a3 s^3 + a1 s + a0`, sorted ascending.
///
/// Repeated roots appear once per multiplicity. Each root gets one Newton
/// step after the closed form.
pub fn cubic_real_roots(a3: f64, a1: f64, a0: f64) -> Vec<f64> {
    assert!(a3 != 0.0, "leading coefficient must be nonzero");
    let p = a1 / a3;
    let q = a0 / a3;
    if p == 0.0 && q == 0.0 {
        return vec![0.0; 3];
    }
    // s^3 + p s + q: disc = -(4p^3 + 27q^2)
    let d4 = 4.0 * p * p * p;
    let d27 = 27.0 * q * q;
    let disc = -(d4 + d27);
    let scale = d4.abs() + d27;
    let mut roots = if disc.abs() <= DISCRIMINANT_TOL * scale {
        if p == 0.0 {
            vec![-q.cbrt(); 3]
        } else {
            let simple = 3.0 * q / p;
            let double = -1.5 * q / p;
            vec![simple, double, double]
        }
    } else if disc > 0.0 {
        // three distinct real roots, p < 0
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * PI * k as f64 / 3.0).cos())
            .collect()
    } else {
        // one real root; pick the non-cancelling Cardano branch
        let sq = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let a = if q > 0.0 { -(q / 2.0 + sq) } else { -q / 2.0 + sq };
        let u = a.cbrt();
        let v = if u == 0.0 { 0.0 } else { -p / (3.0 * u) };
        vec![u + v]
    };
    for r in roots.iter_mut() {
        *r = polish(1.0, p, q, *r);
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

/// All three complex roots of `s^3 + p s + q`, each Newton-polished.
pub fn cubic_complex_roots(p: Complex64, q: Complex64) -> [Complex64; 3] {
    let zero = Complex64::new(0.0, 0.0);
    if p == zero && q == zero {
        return [zero; 3];
    }
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let sq = disc.sqrt();
    // larger-magnitude branch avoids u = 0
    let a1 = -q / 2.0 + sq;
    let a2 = -q / 2.0 - sq;
    let a = if a1.norm() >= a2.norm() { a1 } else { a2 };
    let u0 = a.powf(1.0 / 3.0);
    let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut out = [zero; 3];
    let mut u = u0;
    for slot in out.iter_mut() {
        let v = if u == zero { zero } else { -p / (3.0 * u) };
        let mut s = u + v;
        for _ in 0..2 {
            let f = s * s * s + p * s + q;
            let df = 3.0 * s * s + p;
            if df.norm() == 0.0 {
                break;
            }
            let next = s - f / df;
            if (next * next * next + p * next + q).norm() <= f.norm() {
                s = next;
            }
        }
        *slot = s;
        u *= omega;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (f(a) < 0.0) == (f(m) < 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn three_roots_by_factorization() {
        let r = cubic_real_roots(1.0, -3.0, 0.0);
        let s3 = 3f64.sqrt();
        assert_eq!(r.len(), 3);
        assert!((r[0] + s3).abs() < 1e-14);
        assert!(r[1].abs() < 1e-14);
        assert!((r[2] - s3).abs() < 1e-14);
    }

    #[test]
    fn plastic_number() {
        let oracle = bisect(|s| s * s * s - s - 1.0, 1.0, 2.0);
        let r = cubic_real_roots(1.0, -1.0, -1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - oracle).abs() < 1e-14);
        assert!((r[0] - 1.324_717_957_244_746).abs() < 1e-14);
    }

    #[test]
    fn repeated_roots() {
        assert_eq!(cubic_real_roots(1.0, 0.0, 0.0), vec![0.0, 0.0, 0.0]);
        // (s-1)^2 (s+2) = s^3 - 3s + 2
        let r = cubic_real_roots(1.0, -3.0, 2.0);
        assert_eq!(r.len(), 3);
        assert!((r[0] + 2.0).abs() < 1e-12);
        assert!((r[1] - 1.0).abs() < 1e-7 && (r[2] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn complex_roots_of_i() {
        let r = cubic_complex_roots(Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0));
        let max_re = r.iter().map(|z| z.re).fold(f64::MIN, f64::max);
        assert!((max_re - 3f64.sqrt() / 2.0).abs() < 1e-14);
        for z in r {
            assert!((z * z * z - Complex64::i()).norm() < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn residuals_small(
            a3 in prop_oneof![0.5f64..2.0, -2.0f64..-0.5],
            a1 in -10.0f64..10.0,
            a0 in -10.0f64..10.0,
        ) {
            let roots = cubic_real_roots(a3, a1, a0);
            prop_assert!(roots.len() == 1 || roots.len() == 3);
            prop_assert!(roots.windows(2).all(|w| w[0] <= w[1]));
            for r in roots {
                let res = (a3 * r * r * r + a1 * r + a0).abs();
                prop_assert!(res <= 1e-12 * a0.abs().max(1.0), "root {} residual {}", r, res);
            }
        }
    }
}
