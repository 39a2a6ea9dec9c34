use rand::Rng;

use super::{Amplitude, CodecConfig, SpikeTrain};

/// Rate coding: chip `t` spikes iff the amplitude exceeds a fresh `U(0, 1)` threshold.
pub fn encode_rate<R: Rng + ?Sized>(a: Amplitude, cfg: &CodecConfig, rng: &mut R) -> SpikeTrain {
    let p = a.value();
    SpikeTrain::from_chips((0..cfg.train_len).map(|_| p > rng.random::<f64>()).collect())
}
