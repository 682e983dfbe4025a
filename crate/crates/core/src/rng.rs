//! Seeded random streams.
//!
//! Every Monte Carlo routine splits its work into fixed-size chunks and gives
//! chunk `k` the ChaCha stream `k` of the caller's seed. Results are merged in
//! chunk order, so a fixed seed yields identical output for any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Rng = ChaCha8Rng;

/// Samples handled by one Monte Carlo chunk.
pub const CHUNK: usize = 1 << 14;

/// Deterministic generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a seed with a label so that sub-experiments draw unrelated streams.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `work(rng, len)` over `total` samples split into chunks and returns the
/// per-chunk results in chunk order.
pub fn par_chunks<T, F>(seed: u64, total: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Rng, usize) -> T + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = if k + 1 == chunks { total - k * CHUNK } else { CHUNK };
            let mut rng = stream(seed, k as u64);
            work(&mut rng, len)
        })
        .collect()
}

/// Sum of per-chunk `(sum, sum_sq)` pairs.
pub fn merge_moments(parts: &[(f64, f64)]) -> (f64, f64) {
    parts
        .iter()
        .fold((0.0, 0.0), |(s, q), &(a, b)| (s + a, q + b))
}

/// Mean and standard error from accumulated moments of `n` draws.
pub fn mean_stderr(sum: f64, sum_sq: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}
