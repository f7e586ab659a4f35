//! Monte Carlo eigenvalue samples of the coupled ensemble with `V(x) = x²/2`.

pub mod gue;
pub mod metropolis;
pub mod wasserstein;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use gue::{sample_gue, EigenSample, SampleMeta};
pub use metropolis::{
    effective_potential, metropolis_chain, metropolis_one_matrix, sample_m1, ChainParams, ChainRun,
};
pub use wasserstein::{kolmogorov, semicircle_cdf, wasserstein1};

/// Independent ChaCha stream `stream` derived from `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// All values of a set of samples, sorted.
pub fn pooled(samples: &[EigenSample]) -> Vec<f64> {
    let mut v: Vec<f64> = samples.iter().flat_map(|s| s.values.iter().copied()).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}
