//! Deterministic randomness, derived rather than shared.
//!
//! Every random draw in the crate comes from a stream addressed by
//! `(master_seed, purpose_tag, indices)`. The address is hashed into a ChaCha12
//! key, so streams are independent, order-free (no draw in one stream shifts
//! another), and reproducible across threads, platforms, and process runs.
//! Distribution sampling is implemented here by hand on top of raw 64-bit
//! output — not delegated to a distributions crate — so that the exact draw
//! sequence is pinned by this file alone and cannot drift with a dependency
//! version. The scheme is named so serialized artifacts can record it.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Name of the derivation scheme below; recorded in model files.
pub const RNG_SCHEME: &str = "hdc-rng-v1";

/// Derive an independent random stream for one purpose.
///
/// The key is `SHA-256(scheme ‖ master ‖ tag ‖ indices)` with fixed-width
/// little-endian integer encoding, so every distinct address yields an
/// unrelated stream.
pub fn stream(master_seed: u64, tag: &str, indices: &[u64]) -> ChaCha12Rng {
    let mut h = Sha256::new();
    h.update(RNG_SCHEME.as_bytes());
    h.update([0u8]);
    h.update(master_seed.to_le_bytes());
    h.update((tag.len() as u64).to_le_bytes());
    h.update(tag.as_bytes());
    for ix in indices {
        h.update(ix.to_le_bytes());
    }
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(key)
}

/// Uniform integer in `[0, bound)` by rejection; unbiased for every bound.
pub fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0, "uniform_below bound must be positive");
    if bound.is_power_of_two() {
        return rng.next_u64() & (bound - 1);
    }
    // Reject the tail of the 64-bit range that does not divide evenly.
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// Uniform draw in `(0, 1]`: 53 mantissa bits, never exactly zero.
pub fn unit_open(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box–Muller. Consumes exactly two 64-bit draws per
/// call; the sine partner is discarded to keep the stream position a pure
/// function of the call count.
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    let u1 = unit_open(rng);
    let u2 = ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// In-place Fisher–Yates shuffle driven by `uniform_below`.
pub fn shuffle<T>(rng: &mut impl RngCore, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, (i + 1) as u64) as usize;
        items.swap(i, j);
    }
}
