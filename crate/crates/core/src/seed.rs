//! Deterministic derivation of per-trial random streams.
//!
//! A grid point gets a seed from `(master_seed, n_bits, train_len, grid_index)`
//! and every trial gets its own ChaCha generator seeded from `(point, trial)`.
//! The scheme is left out of the key, so all four schemes see the same level
//! draws and the same channel noise at a given grid point and trial.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream carrying the level draw followed by the channel noise.
const CHANNEL_STREAM: u64 = 0;
/// Stream carrying encoder randomness (rate coding thresholds).
const CODEC_STREAM: u64 = 1;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a tuple of words.
pub fn mix(seed: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(seed), |h, &w| splitmix64(h ^ splitmix64(w)))
}

pub fn point_seed(master_seed: u64, n_bits: u32, train_len: usize, grid_index: usize) -> u64 {
    mix(master_seed, &[u64::from(n_bits), train_len as u64, grid_index as u64])
}

/// The two generators used by one trial.
pub(crate) struct TrialRngs {
    pub channel: ChaCha8Rng,
    pub codec: ChaCha8Rng,
}

impl TrialRngs {
    pub fn new(point_seed: u64, trial: u64) -> Self {
        let seed = mix(point_seed, &[trial]);
        let mut channel = ChaCha8Rng::seed_from_u64(seed);
        channel.set_stream(CHANNEL_STREAM);
        let mut codec = ChaCha8Rng::seed_from_u64(seed);
        codec.set_stream(CODEC_STREAM);
        TrialRngs { channel, codec }
    }
}
