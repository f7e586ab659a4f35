use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::rng_stream;

/// Stream index used for GUE draws.
pub const GUE_STREAM: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SampleMeta {
    pub alpha: f64,
    pub tau: f64,
    pub burnin: usize,
    pub steps: usize,
    /// Position of this sample within its run.
    pub index: usize,
}

/// Sorted eigenvalues of one draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSample {
    pub n: usize,
    pub values: Vec<f64>,
    pub seed: u64,
    pub meta: SampleMeta,
}

impl EigenSample {
    pub fn new(mut values: Vec<f64>, seed: u64, meta: SampleMeta) -> Self {
        values.sort_by(|a, b| a.total_cmp(b));
        EigenSample {
            n: values.len(),
            values,
            seed,
            meta,
        }
    }
}

/// Hermitian matrix with density ∝ exp(−(n/2) Tr M²), plus `shift` on the diagonal.
pub fn gue_matrix(n: usize, rng: &mut ChaCha8Rng, shift: Option<&[f64]>) -> DMatrix<Complex64> {
    let sd_diag = (1.0 / n as f64).sqrt();
    let sd_off = (0.5 / n as f64).sqrt();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        let s = shift.map_or(0.0, |s| s[i]);
        m[(i, i)] = Complex64::new(sd_diag * d + s, 0.0);
        for j in (i + 1)..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(sd_off * re, sd_off * im);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix (Householder tridiagonalization, then
/// implicit symmetric QR on the tridiagonal form).
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// One GUE draw of size `n`.
pub fn sample_gue(n: usize, seed: u64) -> EigenSample {
    assert!(n >= 1, "matrix size must be positive");
    let mut rng = rng_stream(seed, GUE_STREAM);
    let m = gue_matrix(n, &mut rng, None);
    EigenSample::new(hermitian_eigenvalues(m), seed, SampleMeta::default())
}
