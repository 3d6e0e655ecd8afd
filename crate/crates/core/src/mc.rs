//! Deterministic Monte Carlo plumbing.
//!
//! Work is split into fixed-size chunks. Chunk `i` of a computation draws
//! from ChaCha stream `i` of a key derived from `(seed, domain)`, so the
//! random numbers a chunk sees never depend on how chunks are scheduled.
//! Chunk results are collected in index order and reduced sequentially,
//! which makes every estimate bit-identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Test points per chunk.
pub const CHUNK: usize = 2048;

/// Stream domains, so that e.g. design draws and test points never share
/// a key even when the caller passes the same seed.
pub mod domain {
    pub const TEST_POINTS: u64 = 0x7465_7374;
    pub const DESIGN: u64 = 0x6465_7369;
    pub const ORACLE: u64 = 0x6f72_6163;
    pub const AUX: u64 = 0x6175_7820;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub value: f64,
    pub std_err: f64,
    pub samples: u64,
    pub design_replications: u32,
    pub seed: u64,
}

impl EstimateResult {
    /// Binomial proportion estimate with standard error `sqrt(p(1-p)/N)`.
    pub fn binomial(hits: u64, samples: u64, seed: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Self {
            value: p,
            std_err: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
            design_replications: 1,
            seed,
        }
    }

    /// `|self - other|` in units of the combined standard error.
    pub fn z_distance(&self, other: &EstimateResult) -> f64 {
        (self.value - other.value).abs() / self.std_err.hypot(other.std_err)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a sub-seed; used to give each design replication its own key.
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(domain)) ^ index)
}

/// RNG for stream `index` under `(seed, domain)`.
pub fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(domain)));
    rng.set_stream(index);
    rng
}

/// Fills `out` with iid uniforms on `[-half_side, half_side]`.
pub fn fill_uniform_cube<R: Rng + ?Sized>(rng: &mut R, half_side: f64, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = half_side * (2.0 * rng.random::<f64>() - 1.0);
    }
}

/// Sizes of the chunks covering `total` items.
pub fn chunk_sizes(total: u64, chunk: usize) -> impl Iterator<Item = (u64, usize)> {
    let chunk = chunk as u64;
    let n = total.div_ceil(chunk);
    (0..n).map(move |i| (i, (chunk.min(total - i * chunk)) as usize))
}

/// Maps `f(chunk_index, chunk_len)` over all chunks in parallel and returns
/// the results in chunk order.
pub fn par_chunks<T, F>(total: u64, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, usize) -> T + Sync + Send,
{
    let chunks: Vec<(u64, usize)> = chunk_sizes(total, chunk).collect();
    chunks.into_par_iter().map(|(i, len)| f(i, len)).collect()
}

/// Parses `HYPERCOVER_THREADS`; `None` when unset or invalid.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("HYPERCOVER_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Installs the global rayon pool sized from `HYPERCOVER_THREADS`.
/// Does nothing when the variable is absent or a pool already exists.
pub fn configure_threads_from_env() {
    if let Some(n) = threads_from_env() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}
