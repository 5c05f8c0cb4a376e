//! Deterministic per-task seed derivation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for task `index` of a run seeded with `seed`: the seed XOR a hash of the index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d))
}

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_tasks_get_distinct_seeds() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(s.len(), 1000);
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
