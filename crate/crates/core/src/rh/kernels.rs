use std::f64::consts::PI;

use crate::error::Result;
use crate::model::airy;

/// `sin π(x−y) / (π(x−y))`, equal to 1 on the diagonal.
pub fn sine_kernel(x: f64, y: f64) -> f64 {
    let d = PI * (x - y);
    if d.abs() < 1e-8 {
        1.0 - d * d / 6.0
    } else {
        d.sin() / d
    }
}

/// `(Ai(x)Ai′(y) − Ai′(x)Ai(y)) / (x − y)`; on the diagonal `Ai′(x)² − x Ai(x)²`.
pub fn airy_kernel(x: f64, y: f64) -> Result<f64> {
    let (ax, apx) = airy(x)?;
    if x == y {
        return Ok(apx * apx - x * ax * ax);
    }
    let (ay, apy) = airy(y)?;
    if (x - y).abs() < 1e-6 {
        // the kernel is symmetric, so its midpoint diagonal value is accurate
        // to O((x − y)²) and avoids the cancellation in the ratio
        let m = 0.5 * (x + y);
        let (am, apm) = airy(m)?;
        return Ok(apm * apm - m * am * am);
    }
    Ok((ax * apy - apx * ay) / (x - y))
}

/// `(a, b) ↦ (s, t) = (¼(a² − 5b), −a)`.
pub fn double_scaling_map(a: f64, b: f64) -> (f64, f64) {
    (0.25 * (a * a - 5.0 * b), -a)
}
