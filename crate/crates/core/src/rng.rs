use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every generator in the crate draws from this stream so a seed fully
/// determines an instance.
pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
