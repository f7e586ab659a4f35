use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cubic::{cubic_complex_roots, cubic_real_roots};
use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// Potentials `V`, `W` of the two-matrix model with coupling `tau`.
///
/// `scale` multiplies `V` (the `λ` in `λV`); it is 1 unless a one-matrix
/// criticality scan is being run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialPair {
    pub v: Polynomial,
    pub w: Polynomial,
    pub tau: f64,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

fn check_confining(p: &Polynomial, name: &str) -> Result<()> {
    if p.degree() == 0 || p.degree() % 2 == 1 || p.leading() <= 0.0 {
        return Err(Error::Invalid(format!(
            "{name} must have even degree and positive leading coefficient, got {p}"
        )));
    }
    Ok(())
}

impl PotentialPair {
    pub fn new(v: Polynomial, w: Polynomial, tau: f64) -> Result<Self> {
        check_confining(&v, "V")?;
        check_confining(&w, "W")?;
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::Invalid(format!("tau must be non-negative, got {tau}")));
        }
        Ok(PotentialPair {
            v,
            w,
            tau,
            scale: 1.0,
        })
    }

    /// `W(y) = y^4/4 + (alpha/2) y^2` paired with the given `V`.
    pub fn quartic(v: Polynomial, alpha: f64, tau: f64) -> Result<Self> {
        PotentialPair::new(v, quartic_w(alpha), tau)
    }

    /// Scaled `V`, i.e. `scale * v`.
    pub fn v_scaled(&self) -> Polynomial {
        self.v.scale(self.scale)
    }

    /// `alpha` read off an even quartic `W`, normalized so that `W = c(y^4/4 + alpha y^2/2)`.
    pub fn alpha(&self) -> Result<f64> {
        let (c4, c2) = even_quartic_coeffs(&self.w)?;
        Ok(2.0 * c2 / (4.0 * c4))
    }
}

pub fn quartic_w(alpha: f64) -> Polynomial {
    Polynomial::new(vec![0.0, 0.0, 0.5 * alpha, 0.0, 0.25])
}

fn even_quartic_coeffs(w: &Polynomial) -> Result<(f64, f64)> {
    if w.degree() != 4 || !w.is_even() {
        return Err(Error::Invalid(format!("W must be an even quartic, got {w}")));
    }
    Ok((w.coeff(4), w.coeff(2)))
}

/// Stationary points of `s ↦ W(s) − τ x s` for the even quartic `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoints {
    pub s1: f64,
    pub s2: Option<f64>,
    pub s3: Option<f64>,
}

/// Classifies the roots of `4 c4 s^3 + 2 c2 s − τx`.
fn classify(c4: f64, c2: f64, x: f64, tau: f64) -> CriticalPoints {
    let roots = cubic_real_roots(4.0 * c4, 2.0 * c2, -tau * x);
    let f = |s: f64| c4 * s.powi(4) + c2 * s * s - tau * x * s;
    let distinct = roots.len() == 3 && roots[0] < roots[1] && roots[1] < roots[2];
    if !distinct {
        // a single well (or a degenerate inflection): the outermost real root
        let s1 = if x >= 0.0 { roots[roots.len() - 1] } else { roots[0] };
        return CriticalPoints {
            s1,
            s2: None,
            s3: None,
        };
    }
    let (lo, mid, hi) = (roots[0], roots[1], roots[2]);
    // ties go to the positive minimizer
    let (s1, s2) = if f(hi) <= f(lo) { (hi, lo) } else { (lo, hi) };
    CriticalPoints {
        s1,
        s2: Some(s2),
        s3: Some(mid),
    }
}

/// Stationary points of `¼s⁴ + (α/2)s² − τxs`.
///
/// At the symmetric tie `x = 0, α < 0` the positive minimizer is reported as
/// `s1`; the minimal value, and hence `V₁`, is the same either way.
pub fn critical_points(x: f64, alpha: f64, tau: f64) -> CriticalPoints {
    classify(0.25, 0.5 * alpha, x, tau)
}

/// `|x|` beyond which `s2`, `s3` cease to exist; zero when `alpha ≥ 0`.
pub fn secondary_bound(alpha: f64, tau: f64) -> f64 {
    if alpha >= 0.0 {
        0.0
    } else {
        2.0 / tau * (-alpha / 3.0).powf(1.5)
    }
}

fn critical_points_pp(x: f64, pp: &PotentialPair) -> Result<CriticalPoints> {
    let (c4, c2) = even_quartic_coeffs(&pp.w)?;
    Ok(classify(c4, c2, x, pp.tau))
}

/// `V₁(x) = V(x) + min_s (W(s) − τxs)`.
pub fn external_field_v1(x: f64, pp: &PotentialPair) -> Result<f64> {
    let cp = critical_points_pp(x, pp)?;
    Ok(pp.v_scaled().eval(x) + pp.w.eval(cp.s1) - pp.tau * x * cp.s1)
}

/// `V₃(x)`: barrier height between the secondary minimum and the local maximum.
pub fn external_field_v3(x: f64, pp: &PotentialPair) -> Result<f64> {
    let cp = critical_points_pp(x, pp)?;
    match (cp.s2, cp.s3) {
        (Some(s2), Some(s3)) => {
            let g = |s: f64| pp.w.eval(s) - pp.tau * x * s;
            Ok((g(s3) - g(s2)).max(0.0))
        }
        _ => Ok(0.0),
    }
}

/// Density of the constraint `σ₂` on the imaginary axis at `z = it`.
pub fn sigma2_density(t: f64, alpha: f64, tau: f64) -> f64 {
    let roots = cubic_complex_roots(Complex64::new(alpha, 0.0), Complex64::new(0.0, -tau * t));
    let max_re = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    (tau / PI * max_re).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half_square() -> Polynomial {
        Polynomial::new(vec![0.0, 0.0, 0.5])
    }

    #[test]
    fn critical_point_examples() {
        let cp = critical_points(1.0, -1.0, 1.0);
        assert!((cp.s1 - 1.324_717_957_244_746).abs() < 1e-13);
        assert!(cp.s2.is_none() && cp.s3.is_none());

        let cp = critical_points(0.0, 1.0, 1.0);
        assert_eq!(cp.s1, 0.0);
        assert!(cp.s2.is_none());

        let cp = critical_points(0.0, -1.0, 1.0);
        assert!((cp.s1 - 1.0).abs() < 1e-14);
        assert!((cp.s2.unwrap() + 1.0).abs() < 1e-14);
        assert!(cp.s3.unwrap().abs() < 1e-14);
    }

    #[test]
    fn v1_examples() {
        let pp = PotentialPair::quartic(half_square(), 1.0, 1.0).unwrap();
        assert_eq!(external_field_v1(0.0, &pp).unwrap(), 0.0);
        let pp = PotentialPair::quartic(half_square(), -1.0, 1.0).unwrap();
        assert!((external_field_v1(0.0, &pp).unwrap() + 0.25).abs() < 1e-14);
        let pp = PotentialPair::quartic(half_square(), 0.0, 1.0).unwrap();
        let s = 2f64.cbrt();
        let expect = 2.0 + 0.25 * s.powi(4) - 2.0 * s;
        assert!((external_field_v1(2.0, &pp).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn v3_examples() {
        let pp = PotentialPair::quartic(half_square(), -1.0, 1.0).unwrap();
        assert_eq!(external_field_v3(1.0, &pp).unwrap(), 0.0);
        assert!((external_field_v3(0.0, &pp).unwrap() - 0.25).abs() < 1e-14);
        let pp = PotentialPair::quartic(half_square(), 1.0, 1.0).unwrap();
        assert_eq!(external_field_v3(0.0, &pp).unwrap(), 0.0);
    }

    #[test]
    fn sigma2_examples() {
        assert!((sigma2_density(0.0, -1.0, 1.0) - 1.0 / PI).abs() < 1e-14);
        assert!(sigma2_density(0.0, 1.0, 1.0).abs() < 1e-14);
        assert!((sigma2_density(1.0, 0.0, 1.0) - 3f64.sqrt() / 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn presence_boundary() {
        for &(alpha, tau) in &[(-1.0, 1.0), (-2.5, 0.7), (-0.3, 2.0)] {
            let b = secondary_bound(alpha, tau);
            let inside = critical_points(b * (1.0 - 1e-10), alpha, tau);
            let outside = critical_points(b * (1.0 + 1e-10), alpha, tau);
            assert!(inside.s2.is_some(), "alpha={alpha} tau={tau}");
            assert!(outside.s2.is_none(), "alpha={alpha} tau={tau}");
        }
    }

    #[test]
    fn rejects_odd_potentials() {
        let v = Polynomial::new(vec![0.0, 1.0, 0.0, 1.0]);
        assert!(PotentialPair::quartic(v, 1.0, 1.0).is_err());
        assert!(PotentialPair::quartic(half_square(), 1.0, -1.0).is_err());
        assert!(PotentialPair::quartic(half_square(), 1.0, 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn stationary_residuals(x in -5.0f64..5.0, alpha in -4.0f64..4.0, tau in 0.1f64..3.0) {
            let cp = critical_points(x, alpha, tau);
            for s in [Some(cp.s1), cp.s2, cp.s3].into_iter().flatten() {
                let r = s * s * s + alpha * s - tau * x;
                prop_assert!(r.abs() <= 1e-10 * (1.0 + s.abs().powi(3)));
            }
            prop_assert_eq!(cp.s2.is_some(), cp.s3.is_some());
            if let (Some(s2), Some(_)) = (cp.s2, cp.s3) {
                let f = |s: f64| 0.25 * s.powi(4) + 0.5 * alpha * s * s - tau * x * s;
                prop_assert!(f(s2) >= f(cp.s1) - 1e-14);
            }
        }

        #[test]
        fn v3_nonnegative(x in -5.0f64..5.0, alpha in -4.0f64..4.0, tau in 0.1f64..3.0) {
            let pp = PotentialPair::quartic(half_square(), alpha, tau).unwrap();
            let v3 = external_field_v3(x, &pp).unwrap();
            prop_assert!(v3 >= 0.0);
            if alpha >= 0.0 {
                prop_assert_eq!(v3, 0.0);
            }
        }

        #[test]
        fn sigma2_even_and_continuous(t in -5.0f64..5.0, alpha in -3.0f64..3.0, tau in 0.2f64..3.0) {
            let a = sigma2_density(t, alpha, tau);
            prop_assert!((a - sigma2_density(-t, alpha, tau)).abs() < 1e-12);
            let h = 1e-7;
            let d = (sigma2_density(t + h, alpha, tau) - a).abs();
            // continuity modulus: Hölder-1/2 at worst near root collisions
            prop_assert!(d < 10.0 * h.sqrt());
        }
    }
}
