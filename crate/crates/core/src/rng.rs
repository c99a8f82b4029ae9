//! Deterministic stream derivation.
//!
//! Every stochastic component (weight init, traffic, exploration noise,
//! minibatch sampling) draws from its own ChaCha stream derived from the
//! master seed, a role tag, and integer coordinates. Two runs with the same
//! config and seed therefore consume independent but reproducible streams,
//! and adding draws to one component never perturbs another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche for cheap seed mixing.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from `master`, a role tag, and coordinates.
pub fn derive_seed(master: u64, tag: &str, coords: &[u64]) -> u64 {
    let mut h = mix(master);
    for &b in tag.as_bytes() {
        h = mix(h ^ u64::from(b));
    }
    for &c in coords {
        h = mix(h ^ c);
    }
    h
}

/// Derive a ChaCha8 stream for one component.
pub fn derive_rng(master: u64, tag: &str, coords: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tag, coords))
}
