//! Seeded, splittable randomness.
//!
//! Every randomized routine in the crate derives one ChaCha8 substream per
//! work item from `(seed, index)`. Results therefore do not depend on how the
//! items are scheduled across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream for work item `index` under `seed`.
pub(crate) fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// SplitMix64 step; used to derive per-cell seeds in grid sweeps.
pub(crate) fn split_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw from the probability simplex (flat Dirichlet), via
/// normalized unit-rate exponentials.
pub(crate) fn sample_simplex<R: Rng>(rng: &mut R, size: usize) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..size)
            .map(|_| {
                let u: f64 = rng.gen();
                -(1.0 - u).ln()
            })
            .collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 && total.is_finite() {
            return draws.into_iter().map(|d| d / total).collect();
        }
    }
}
