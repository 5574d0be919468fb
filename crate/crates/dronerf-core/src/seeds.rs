//! Deterministic seed derivation.
//!
//! Every randomised operation takes an explicit `u64` seed; independent
//! sub-streams (one per dataset sample, per transmitter, per burst, ...)
//! are derived by mixing the parent seed with a domain tag and indices.
//! Derivation is splittable: children never share generator state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finaliser; good avalanche behaviour for seed mixing.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed, a domain tag and indices.
pub fn derive(parent: u64, tag: &str, indices: &[u64]) -> u64 {
    let mut state = splitmix(parent);
    for byte in tag.as_bytes() {
        state = splitmix(state ^ u64::from(*byte));
    }
    for ix in indices {
        state = splitmix(state ^ *ix);
    }
    state
}

/// Seeded generator for a derived stream.
pub fn rng(parent: u64, tag: &str, indices: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(parent, tag, indices))
}
