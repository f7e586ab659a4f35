use crate::equilibrium::GridMeasure;

/// `∫ |F_emp − F_μ|` between the empirical CDF of `values` and the CDF of a
/// piecewise-constant grid measure (normalized to mass 1), computed exactly.
pub fn wasserstein1(values: &[f64], mu: &GridMeasure) -> f64 {
    let mut xs: Vec<f64> = values.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let total = mu.total_mass();
    let h = mu.width();
    // cumulative mass at cell edges
    let mut cum = Vec::with_capacity(mu.cells + 1);
    cum.push(0.0);
    for d in &mu.density {
        let last = *cum.last().unwrap();
        cum.push(last + d * h / total);
    }
    let cdf_mu = |x: f64| -> f64 {
        if x <= mu.left {
            return 0.0;
        }
        if x >= mu.right {
            return 1.0;
        }
        let t = (x - mu.left) / h;
        let i = (t.floor() as usize).min(mu.cells - 1);
        cum[i] + (t - i as f64) * (cum[i + 1] - cum[i])
    };
    let mut breaks: Vec<f64> = (0..=mu.cells).map(|i| mu.edge(i)).collect();
    breaks.extend_from_slice(&xs);
    breaks.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut acc = 0.0;
    let mut k = 0usize;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        while k < xs.len() && xs[k] <= a {
            k += 1;
        }
        let fe = k as f64 / n;
        // F_μ is linear on [a, b]; integrate |linear| exactly
        let (da, db) = (cdf_mu(a) - fe, cdf_mu(b) - fe);
        acc += if da * db >= 0.0 {
            0.5 * (da.abs() + db.abs()) * (b - a)
        } else {
            0.5 * (da * da + db * db) / (da - db).abs() * (b - a)
        };
    }
    acc
}

/// `sup |F_emp − F|` against a reference CDF.
pub fn kolmogorov<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut xs: Vec<f64> = values.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// CDF of the semicircle law of radius `r`.
pub fn semicircle_cdf(r: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        let u = (x / r).clamp(-1.0, 1.0);
        0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / std::f64::consts::PI
    }
}
