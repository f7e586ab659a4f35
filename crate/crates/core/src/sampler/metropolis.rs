use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::gue::{gue_matrix, hermitian_eigenvalues, EigenSample, SampleMeta, GUE_STREAM};
use super::rng_stream;
use crate::error::{Error, Result};
use crate::model::potential::quartic_w;
use crate::model::Polynomial;

/// Stream index used for the Metropolis chain.
pub const CHAIN_STREAM: u64 = 1;

/// `steps` retained states, each `10·n` single-site updates apart, after
/// `burnin` sweeps of `n` updates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub steps: usize,
    pub burnin: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRun {
    pub samples: Vec<EigenSample>,
    /// Acceptance rate after burn-in.
    pub acceptance: f64,
    /// Frozen proposal standard deviation.
    pub step_size: f64,
}

fn check_confining(w: &Polynomial) -> Result<()> {
    if w.degree() == 0 || w.degree() % 2 == 1 || w.leading() <= 0.0 {
        return Err(Error::InvalidEffectivePotential(format!(
            "effective potential must have even degree and positive leading coefficient, got {w}"
        )));
    }
    Ok(())
}

/// Single-site Metropolis chain for the eigenvalue density
/// `∏|yᵢ−yⱼ|² exp(−n Σ W(yⱼ))`.
pub fn metropolis_chain(w: &Polynomial, n: usize, params: ChainParams, seed: u64) -> Result<ChainRun> {
    check_confining(w)?;
    if n == 0 || params.steps == 0 || params.burnin == 0 {
        return Err(Error::Invalid("n, steps and burnin must be positive".into()));
    }
    let mut rng = rng_stream(seed, CHAIN_STREAM);
    let nf = n as f64;
    let mut y: Vec<f64> = (0..n)
        .map(|i| if n == 1 { 0.0 } else { -1.5 + 3.0 * i as f64 / (nf - 1.0) })
        .collect();
    let mut step = 1.0 / nf.sqrt();
    let log_ratio = |y: &[f64], k: usize, new: f64| -> f64 {
        let old = y[k];
        let mut d = -nf * (w.eval(new) - w.eval(old));
        for (j, &yj) in y.iter().enumerate() {
            if j != k {
                d += 2.0 * ((new - yj).abs().ln() - (old - yj).abs().ln());
            }
        }
        d
    };
    let update = |y: &mut Vec<f64>, step: f64, rng: &mut rand_chacha::ChaCha8Rng| -> bool {
        let k = rng.random_range(0..n);
        let z: f64 = rng.sample(StandardNormal);
        let new = y[k] + step * z;
        let lr = log_ratio(y, k, new);
        let u: f64 = rng.random();
        if lr >= 0.0 || u.ln() < lr {
            y[k] = new;
            true
        } else {
            false
        }
    };

    // burn-in with step adaptation towards acceptance 0.3–0.5
    let window = 100usize;
    let mut accepted = 0usize;
    for it in 1..=params.burnin * n {
        if update(&mut y, step, &mut rng) {
            accepted += 1;
        }
        if it % window == 0 {
            let rate = accepted as f64 / window as f64;
            if rate > 0.5 {
                step *= 1.15;
            } else if rate < 0.3 {
                step *= 0.85;
            }
            accepted = 0;
        }
    }

    let thin = 10 * n;
    let mut samples = Vec::with_capacity(params.steps);
    let mut acc_total = 0usize;
    for s in 0..params.steps {
        for _ in 0..thin {
            if update(&mut y, step, &mut rng) {
                acc_total += 1;
            }
        }
        samples.push(EigenSample::new(
            y.clone(),
            seed,
            SampleMeta {
                alpha: 0.0,
                tau: 0.0,
                burnin: params.burnin,
                steps: params.steps,
                index: s,
            },
        ));
    }
    Ok(ChainRun {
        samples,
        acceptance: acc_total as f64 / (params.steps * thin) as f64,
        step_size: step,
    })
}

/// Last retained state of [`metropolis_chain`].
pub fn metropolis_one_matrix(
    w: &Polynomial,
    n: usize,
    steps: usize,
    burnin: usize,
    seed: u64,
) -> Result<EigenSample> {
    let run = metropolis_chain(w, n, ChainParams { steps, burnin }, seed)?;
    Ok(run.samples.into_iter().last().expect("steps ≥ 1"))
}

/// `W_eff(y) = W(y) − τ² y² / 2` for `V(x) = x²/2`.
pub fn effective_potential(alpha: f64, tau: f64) -> Polynomial {
    &quartic_w(alpha) - &Polynomial::monomial(2, 0.5 * tau * tau)
}

/// Eigenvalues of `M₁ = G + τ·diag(y)`: `y` runs over the retained states of a
/// chain for `W_eff`, `G` is a fresh GUE draw for each.
pub fn sample_m1(alpha: f64, tau: f64, n: usize, seed: u64, chain: ChainParams) -> Result<Vec<EigenSample>> {
    let w_eff = effective_potential(alpha, tau);
    let run = metropolis_chain(&w_eff, n, chain, seed)?;
    let mut rng = rng_stream(seed, GUE_STREAM);
    Ok(run
        .samples
        .iter()
        .map(|ys| {
            let shift: Vec<f64> = ys.values.iter().map(|y| tau * y).collect();
            let m = gue_matrix(n, &mut rng, Some(&shift));
            EigenSample::new(
                hermitian_eigenvalues(m),
                seed,
                SampleMeta {
                    alpha,
                    tau,
                    ..ys.meta
                },
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_particle_is_gaussian() {
        let w = Polynomial::new(vec![0.0, 0.0, 0.5]);
        let run = metropolis_chain(&w, 1, ChainParams { steps: 4000, burnin: 200 }, 3).unwrap();
        let mean = run.samples.iter().map(|s| s.values[0]).sum::<f64>() / 4000.0;
        assert!(mean.abs() < 0.1, "{mean}");
    }

    #[test]
    fn rejects_non_confining() {
        let w = Polynomial::new(vec![0.0, 0.0, -1.0]);
        assert!(matches!(
            metropolis_chain(&w, 3, ChainParams { steps: 1, burnin: 1 }, 0),
            Err(Error::InvalidEffectivePotential(_))
        ));
        assert!(effective_potential(0.0, 1.0).leading() > 0.0);
    }

    #[test]
    fn deterministic_chain() {
        let w = Polynomial::new(vec![0.0, 0.0, 0.5]);
        let p = ChainParams { steps: 3, burnin: 5 };
        assert_eq!(metropolis_chain(&w, 10, p, 11).unwrap(), metropolis_chain(&w, 10, p, 11).unwrap());
    }
}
