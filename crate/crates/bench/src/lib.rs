//! Instance fixtures for benchmarks and timing experiments.

use mfscp_core::generate::{random_instance, RandomSpec};
use mfscp_core::ScpInstance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A weighted random instance with roughly `nnz` nonzeros and `rows` rows.
///
/// Columns are sized so that the density stays at `nnz / (rows * cols)`.
pub fn weighted(rows: usize, cols: usize, nnz: usize, seed: u64) -> ScpInstance {
    let density = (nnz as f64 / (rows as f64 * cols as f64)).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(
        &mut rng,
        &RandomSpec {
            rows,
            cols,
            density,
            cost_min: 1,
            cost_max: 100,
        },
    )
}

/// Instances of similar shape to the 200 x 1000, 2% weighted benchmark set.
pub fn set4_like(seed: u64) -> ScpInstance {
    weighted(200, 1000, 4000, seed)
}

/// Instances of increasing size, for throughput scaling.
pub fn scaling_series() -> Vec<ScpInstance> {
    [10_000, 30_000, 100_000, 300_000]
        .iter()
        .enumerate()
        .map(|(i, &nnz)| weighted(nnz / 50, 1000, nnz, i as u64))
        .collect()
}
