//! Euclidean projection onto `{m : Σ m = mass, 0 ≤ m ≤ upper}`.

use crate::error::{Error, Result};

/// Projects `y` onto the capped simplex of total `mass`.
///
/// The projection is `clip(y − λ, 0, upper)` for the unique shift `λ` that
/// matches the mass; `λ` is bracketed by bisection and then fixed exactly on
/// the resulting free set.
pub fn project_capped_simplex(y: &[f64], mass: f64, upper: Option<&[f64]>) -> Result<Vec<f64>> {
    let cap = |i: usize| upper.map_or(f64::INFINITY, |u| u[i]);
    if let Some(u) = upper {
        let available: f64 = u.iter().sum();
        if available < mass {
            return Err(Error::InfeasibleConstraint {
                available,
                required: mass,
            });
        }
    }
    let total = |lambda: f64| -> f64 {
        y.iter()
            .enumerate()
            .map(|(i, &v)| (v - lambda).clamp(0.0, cap(i)))
            .sum()
    };
    let ymax = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    // total(hi) = 0 ≤ mass ≤ total(lo)
    let hi = ymax;
    let mut lo = ymin - mass - 1.0;
    if upper.is_some() {
        let umax = (0..y.len()).map(cap).fold(0.0, f64::max);
        lo = lo.min(ymin - umax - 1.0);
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > mass {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    // exact shift on the free set
    let mut free = 0usize;
    let mut fixed = 0.0;
    let mut free_sum = 0.0;
    for (i, &v) in y.iter().enumerate() {
        let x = v - lambda;
        if x <= 0.0 {
        } else if x >= cap(i) {
            fixed += cap(i);
        } else {
            free += 1;
            free_sum += v;
        }
    }
    let lambda = if free > 0 {
        let exact = (free_sum + fixed - mass) / free as f64;
        if exact >= lo - 1e-12 && exact <= hi + 1e-12 {
            exact
        } else {
            lambda
        }
    } else {
        lambda
    };
    Ok(y.iter()
        .enumerate()
        .map(|(i, &v)| (v - lambda).clamp(0.0, cap(i)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn already_feasible_is_fixed() {
        let y = vec![0.2, 0.3, 0.5];
        let p = project_capped_simplex(&y, 1.0, None).unwrap();
        for (a, b) in p.iter().zip(&y) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn infeasible_cap() {
        let u = vec![0.1, 0.1];
        assert!(matches!(
            project_capped_simplex(&[1.0, 1.0], 1.0, Some(&u)),
            Err(Error::InfeasibleConstraint { .. })
        ));
    }

    proptest! {
        #[test]
        fn feasible_and_optimal(
            y in prop::collection::vec(-2.0f64..2.0, 2..40),
            caps in prop::collection::vec(0.05f64..1.0, 40),
            mass in 0.1f64..1.0,
        ) {
            let n = y.len();
            let u: Vec<f64> = caps[..n].iter().map(|c| c.max(mass / n as f64 * 1.5)).collect();
            let p = project_capped_simplex(&y, mass, Some(&u)).unwrap();
            let s: f64 = p.iter().sum();
            prop_assert!((s - mass).abs() < 1e-10);
            for i in 0..n {
                prop_assert!(p[i] >= 0.0 && p[i] <= u[i]);
            }
            // optimality: y − p is constant on free coordinates
            let shifts: Vec<f64> = (0..n)
                .filter(|&i| p[i] > 0.0 && p[i] < u[i])
                .map(|i| y[i] - p[i])
                .collect();
            if let Some(&first) = shifts.first() {
                for s in &shifts {
                    prop_assert!((s - first).abs() < 1e-10);
                }
                for i in 0..n {
                    if p[i] == 0.0 { prop_assert!(y[i] - first <= 1e-10); }
                    if p[i] == u[i] { prop_assert!(y[i] - first >= -1e-10); }
                }
            }
        }

        #[test]
        fn preserves_symmetry(half in prop::collection::vec(-1.0f64..1.0, 1..20), mass in 0.1f64..2.0) {
            let mut y = half.clone();
            y.extend(half.iter().rev());
            let p = project_capped_simplex(&y, mass, None).unwrap();
            let n = p.len();
            for i in 0..n {
                prop_assert!((p[i] - p[n - 1 - i]).abs() < 1e-15);
            }
        }
    }
}
