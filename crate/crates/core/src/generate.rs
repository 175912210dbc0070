//! Seeded random instance generation for sweeps. Same seed, same instance,
//! on every platform: the generator runs on a fixed-algorithm stream cipher
//! RNG, never the OS entropy pool.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{AltSet, AlternativeId, Instance, RoundSpec};

/// Builds an instance with `n` voters and `t` rounds; each round offers
/// between 1 and `max_alts` alternatives (labeled `c1`, `c2`, ... in
/// tie-break order) and every voter approves a uniform non-empty subset.
pub fn generate_random(n: usize, t: usize, max_alts: usize, seed: u64) -> Instance {
    assert!(n >= 1 && t >= 1 && max_alts >= 1, "degenerate parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rounds = (0..t)
        .map(|_| {
            let count = rng.gen_range(1..=max_alts);
            let alternatives = (1..=count)
                .map(|i| AlternativeId::new(format!("c{i}")))
                .collect();
            let full = (1u64 << count) - 1;
            let approvals = (0..n).map(|_| AltSet(rng.gen_range(1..=full))).collect();
            RoundSpec {
                alternatives,
                approvals,
            }
        })
        .collect();
    Instance::new(n, rounds).expect("generated instances satisfy the model invariants")
}

/// The instances for a contiguous seed range, inclusive on both ends.
pub fn generate_batch(n: usize, t: usize, max_alts: usize, seeds: (u64, u64)) -> Vec<Instance> {
    (seeds.0..=seeds.1)
        .map(|seed| generate_random(n, t, max_alts, seed))
        .collect()
}
