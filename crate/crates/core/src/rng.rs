//! Counter-style RNG streams keyed by `(seed, stream, frame, indices)`.
//!
//! Every random draw in the crate comes from a fresh ChaCha8 generator whose
//! 256-bit seed is the SHA-256 digest of the key. Two calls with the same key
//! produce the same sequence regardless of thread, call order or platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Build the generator for one keyed item.
///
/// `stream` separates independent consumers (window sampling, cutout holes,
/// partner selection) so they never share a sequence for the same frame.
pub fn keyed_rng(seed: u64, stream: &str, frame_id: &str, indices: &[u64]) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    // length prefixes keep ("ab", "c") and ("a", "bc") apart
    hasher.update((stream.len() as u64).to_le_bytes());
    hasher.update(stream.as_bytes());
    hasher.update((frame_id.len() as u64).to_le_bytes());
    hasher.update(frame_id.as_bytes());
    for index in indices {
        hasher.update(index.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}
