//! Deterministic random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream selected by a
//! 64-bit key and a 64-bit stream index. Keys are derived from user seeds with
//! the SplitMix64 finalizer, so the mapping from (seed, replicate, purpose) to
//! bits is fixed and reproducible in any language that implements ChaCha8:
//!
//! * key bytes: four consecutive SplitMix64 outputs of the key, little endian;
//! * uniform draw: the top 53 bits of a `u64` output times 2⁻⁵³.
//!
//! Population generation uses one stream per adjacency row, so rows can be
//! filled in parallel without changing the result.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Domain-separation constant for population adjacency draws.
pub const DOMAIN_POPULATION: u64 = 0x706f_7075_6c61_7469;
/// Domain-separation constant for node selection masks.
pub const DOMAIN_MASK: u64 = 0x6d61_736b_5f73_656c;
/// Domain-separation constant for k-means seeding.
pub const DOMAIN_KMEANS: u64 = 0x6b6d_6561_6e73_2b2b;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function applied to `x + golden`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive mixing of two words: `splitmix64(a ^ splitmix64(b))`.
pub fn mix64(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b))
}

/// Seed of replicate `m` derived from a base seed.
pub fn replicate_seed(base: u64, m: u64) -> u64 {
    mix64(base, m)
}

/// Key for a given seed and purpose.
pub fn domain_key(seed: u64, domain: u64) -> u64 {
    mix64(seed, domain)
}

/// A ChaCha8 stream for `(key, stream)`.
pub fn stream(key: u64, stream: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    let mut state = key;
    for chunk in bytes.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(bytes);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `0..n` by rejection, `n > 0`.
pub fn below<R: RngCore>(rng: &mut R, n: usize) -> usize {
    let n = n as u64;
    let zone = u64::MAX - (u64::MAX - n + 1) % n;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return (x % n) as usize;
        }
    }
}
