use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III")]
    III,
    #[serde(rename = "IV")]
    IV,
    /// On `τ² = α + 2`.
    BoundaryParabola,
    /// On `ατ² = −1`.
    BoundaryHyperbola,
    /// On both curves, i.e. at `(α, τ) = (−1, 1)`.
    Multicritical,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::I => "I",
            Phase::II => "II",
            Phase::III => "III",
            Phase::IV => "IV",
            Phase::BoundaryParabola => "boundary-parabola",
            Phase::BoundaryHyperbola => "boundary-hyperbola",
            Phase::Multicritical => "multicritical",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub alpha: f64,
    pub tau: f64,
    pub case: Phase,
}

pub const DEFAULT_PHASE_TOL: f64 = 1e-9;

/// Case of the quartic/quadratic model at `(α, τ)`.
///
/// The open region `{ατ² > −1, τ² > α + 2}` has two components, one on each
/// side of `τ = 1`; the upper one is Case II and the lower one Case IV.
pub fn classify_phase(alpha: f64, tau: f64, tol: f64) -> Result<PhasePoint> {
    if !(tau > 0.0) || !alpha.is_finite() || !tau.is_finite() {
        return Err(Error::Invalid(format!("need finite alpha and tau > 0, got ({alpha}, {tau})")));
    }
    let t2 = tau * tau;
    let on_parabola = (t2 - (alpha + 2.0)).abs() <= tol;
    let on_hyperbola = (alpha * t2 + 1.0).abs() <= tol;
    let case = match (on_parabola, on_hyperbola) {
        (true, true) => Phase::Multicritical,
        (true, false) => Phase::BoundaryParabola,
        (false, true) => Phase::BoundaryHyperbola,
        _ if alpha * t2 < -1.0 => Phase::III,
        _ if t2 < alpha + 2.0 => Phase::I,
        _ if tau > 1.0 => Phase::II,
        _ => Phase::IV,
    };
    Ok(PhasePoint { alpha, tau, case })
}

/// A pair of points just below and just above one of the two critical curves
/// together with the cases they must fall into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StraddlePair {
    pub below: PhasePoint,
    pub above: PhasePoint,
    pub expected: (Phase, Phase),
}

impl StraddlePair {
    pub fn toggles_as_expected(&self) -> bool {
        (self.below.case, self.above.case) == self.expected
    }
}

/// `per_curve` pairs across each curve, straddling it in `τ` by a relative
/// offset `eps`. Half of the pairs on each curve sit on either side of the
/// crossing at `α = −1`.
pub fn straddling_pairs(per_curve: usize, eps: f64) -> Result<Vec<StraddlePair>> {
    let mut out = Vec::with_capacity(2 * per_curve);
    let half = per_curve / 2;
    let make = |alpha: f64, tau: f64, expected| -> Result<StraddlePair> {
        Ok(StraddlePair {
            below: classify_phase(alpha, tau * (1.0 - eps), DEFAULT_PHASE_TOL)?,
            above: classify_phase(alpha, tau * (1.0 + eps), DEFAULT_PHASE_TOL)?,
            expected,
        })
    };
    for k in 0..per_curve {
        // τ² = α + 2: α > −1 separates I/II, α ∈ (−2, −1) separates I/IV
        let (alpha, expected) = if k < half {
            (-1.0 + 0.4 * (k + 1) as f64, (Phase::I, Phase::II))
        } else {
            let j = (k - half + 1) as f64 / (per_curve - half + 1) as f64;
            (-2.0 + j, (Phase::I, Phase::IV))
        };
        out.push(make(alpha, (alpha + 2.0).sqrt(), expected)?);
    }
    for k in 0..per_curve {
        // ατ² = −1: τ > 1 separates II/III, τ < 1 separates IV/III
        let (alpha, expected) = if k < half {
            let j = (k + 1) as f64 / (half + 1) as f64;
            (-j, (Phase::II, Phase::III))
        } else {
            (-1.0 - 0.5 * (k - half + 1) as f64, (Phase::IV, Phase::III))
        };
        out.push(make(alpha, (-1.0 / alpha).sqrt(), expected)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(a: f64, t: f64) -> Phase {
        classify_phase(a, t, DEFAULT_PHASE_TOL).unwrap().case
    }

    #[test]
    fn label_points() {
        assert_eq!(case(2.0, 0.8), Phase::I);
        assert_eq!(case(1.0, 3.0), Phase::II);
        assert_eq!(case(-2.0, 3.0), Phase::III);
        assert_eq!(case(-2.3, 0.2), Phase::IV);
        assert_eq!(case(-1.0, 1.0), Phase::Multicritical);
        assert_eq!(case(0.0, 2f64.sqrt()), Phase::BoundaryParabola);
        assert_eq!(case(-4.0, 0.5), Phase::BoundaryHyperbola);
        assert!(classify_phase(0.0, 0.0, 1e-9).is_err());
    }

    #[test]
    fn straddling_pairs_toggle() {
        let pairs = straddling_pairs(10, 1e-3).unwrap();
        assert_eq!(pairs.len(), 20);
        for p in &pairs {
            assert!(p.toggles_as_expected(), "{p:?}");
        }
    }

    #[test]
    fn locally_constant_off_the_curves() {
        for &(a, t) in &[(2.0, 0.8), (1.0, 3.0), (-2.0, 3.0), (-2.3, 0.2)] {
            let c = case(a, t);
            for d in [-0.01, 0.01] {
                assert_eq!(case(a + d, t), c);
                assert_eq!(case(a, t + d), c);
            }
        }
    }

    #[test]
    fn display_names() {
        assert_eq!(serde_json::to_string(&Phase::III).unwrap(), "\"III\"");
        assert_eq!(Phase::BoundaryParabola.to_string(), "boundary-parabola");
        assert_eq!(Phase::Multicritical.to_string(), "multicritical");
    }
}
