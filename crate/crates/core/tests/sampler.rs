use twomat::equilibrium::vector::default_grids;
use twomat::equilibrium::{solve_vector_equilibrium, Axis, GridMeasure};
use twomat::model::Polynomial;
use twomat::sampler::{
    kolmogorov, metropolis_chain, pooled, sample_gue, sample_m1, semicircle_cdf, wasserstein1, ChainParams,
};

use std::f64::consts::PI;

fn half_square() -> Polynomial {
    Polynomial::new(vec![0.0, 0.0, 0.5])
}

/// CDF of a density on [a, b] by trapezoid tabulation.
fn tabulated_cdf(rho: impl Fn(f64) -> f64, a: f64, b: f64) -> impl Fn(f64) -> f64 {
    let m = 20_000;
    let h = (b - a) / m as f64;
    let mut cum = vec![0.0];
    for i in 0..m {
        let x = a + i as f64 * h;
        cum.push(cum[i] + 0.5 * h * (rho(x) + rho(x + h)));
    }
    let total = cum[m];
    move |x: f64| {
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return 1.0;
        }
        let t = (x - a) / h;
        let i = (t as usize).min(m - 1);
        (cum[i] + (t - i as f64) * (cum[i + 1] - cum[i])) / total
    }
}

fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[test]
fn gue_matches_semicircle() {
    let samples: Vec<_> = (0..100).map(|s| sample_gue(200, 1000 + s)).collect();
    let all = pooled(&samples);
    let k = kolmogorov(&all, semicircle_cdf(2.0));
    assert!(k <= 0.03, "{k}");
    let second = samples
        .iter()
        .map(|s| s.values.iter().map(|v| v * v).sum::<f64>() / 200.0)
        .sum::<f64>()
        / 100.0;
    assert!((second - 1.0).abs() <= 0.05, "{second}");
}

#[test]
fn chain_for_gaussian_weight_gives_semicircle() {
    let run = metropolis_chain(&half_square(), 100, ChainParams { steps: 50, burnin: 200 }, 5).unwrap();
    let k = kolmogorov(&pooled(&run.samples), semicircle_cdf(2.0));
    assert!(k <= 0.05, "{k}");
    assert!((0.2..=0.6).contains(&run.acceptance), "{}", run.acceptance);
    for s in &run.samples {
        let range = s.values[s.n - 1] - s.values[0];
        assert!(s.values.windows(2).all(|w| w[1] - w[0] > 1e-6 * range / s.n as f64));
    }
}

#[test]
fn chain_for_double_well() {
    let w = Polynomial::new(vec![0.0, 0.0, -1.0, 0.0, 0.25]);
    let run = metropolis_chain(&w, 100, ChainParams { steps: 50, burnin: 200 }, 9).unwrap();
    let rho = |x: f64| x * x * (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI);
    let k = kolmogorov(&pooled(&run.samples), tabulated_cdf(rho, -2.0, 2.0));
    assert!(k <= 0.06, "{k}");
    assert!((0.2..=0.6).contains(&run.acceptance), "{}", run.acceptance);
}

#[test]
fn vanishing_coupling_recovers_gue() {
    let p = ChainParams { steps: 40, burnin: 50 };
    let coupled = pooled(&sample_m1(0.0, 1e-6, 60, 21, p).unwrap());
    let free = pooled(&(0..40).map(|s| sample_gue(60, 500 + s)).collect::<Vec<_>>());
    let d = two_sample_ks(&coupled, &free);
    assert!(d <= 0.05, "{d}");
}

#[test]
fn m1_samples_match_equilibrium_measure() {
    let sol = solve_vector_equilibrium(0.0, 1.0, &half_square(), default_grids(400), 5000, 5e-3).unwrap();
    let samples = sample_m1(0.0, 1.0, 100, 77, ChainParams { steps: 200, burnin: 200 }).unwrap();
    let all = pooled(&samples);
    let w = wasserstein1(&all, &sol.mu1);
    assert!(w <= 0.05, "{w}");
    let n = all.len() as f64;
    let mean = all.iter().sum::<f64>() / n;
    // per-sample means are the independent units
    let means: Vec<f64> = samples.iter().map(|s| s.values.iter().sum::<f64>() / s.n as f64).collect();
    let m = means.len() as f64;
    let sd = (means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    assert!(mean.abs() <= 3.0 * sd / m.sqrt(), "mean {mean} se {}", sd / m.sqrt());
    assert_eq!(samples, sample_m1(0.0, 1.0, 100, 77, ChainParams { steps: 200, burnin: 200 }).unwrap());
}

#[test]
fn multicritical_density_dips_at_origin() {
    let samples = sample_m1(-1.0, 1.0, 150, 3, ChainParams { steps: 60, burnin: 200 }).unwrap();
    let all = pooled(&samples);
    let count = |a: f64, b: f64| all.iter().filter(|&&x| x >= a && x < b).count() as f64;
    let centre = count(-0.15, 0.15);
    let side = 0.5 * (count(0.45, 0.75) + count(-0.75, -0.45));
    assert!(centre < side, "{centre} vs {side}");
}

#[test]
fn self_distance_of_grid_measure() {
    let mut g = GridMeasure::template(-2.5, 2.5, 500, Axis::Real, 1.0).unwrap();
    g.density = g.cell_averages(|x| (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI), 6);
    let cdf = semicircle_cdf(2.0);
    let xs: Vec<f64> = (0..10_000)
        .map(|i| {
            let p = (i as f64 + 0.5) / 1e4;
            let (mut lo, mut hi) = (-2.0, 2.0);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if cdf(m) < p {
                    lo = m
                } else {
                    hi = m
                }
            }
            lo
        })
        .collect();
    assert!(wasserstein1(&xs, &g) <= 0.01);
}
